use bhl_core::attractor::{cloud_norm, hausdorff_semi, hausdorff_sym};
use bhl_core::LatticeWindow;

use super::{discrete_attractor, reference_attractor, trend_nonincreasing, window_space, Outcome};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::table::ResultTable;

/// Distance of the implicit-Euler attractors `A^eps` to a fine reference
/// attractor of the continuous system, over the step grid.
pub fn run_eps_convergence(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    let p = cfg.params()?;
    let space = window_space(cfg);
    let seed = cfg.seed(0);
    let reference = reference_attractor::<LatticeWindow<f64>>(&p, cfg, space, seed)?;
    let mut table = ResultTable::new(
        "converge_eps",
        cfg,
        &["eps", "distance", "symmetric_distance", "norm", "steps"],
    );
    let mut out_clouds = Vec::new();
    for &eps in &cfg.grids.eps_list {
        let run = discrete_attractor::<LatticeWindow<f64>>(&p, cfg, eps, space, seed)?;
        let a = &run.cloud;
        table.push_row(&[
            eps,
            hausdorff_semi(a, &reference.cloud)?,
            hausdorff_sym(a, &reference.cloud)?,
            cloud_norm(a),
            a.meta.steps_evolved as f64,
        ]);
        out_clouds.push((format!("eps_{eps}"), run.cloud));
    }
    let d = table.column("distance").unwrap_or_default().to_vec();
    let (rel, floor) = (cfg.study.trend_slack, cfg.trend_floor());
    table.set("trend_slack", rel);
    table.set("trend_floor", floor);
    table.set("trend_ok", trend_nonincreasing(&d, rel, floor));
    table.set("reference_norm", cloud_norm(&reference.cloud));
    table.set("reference_steps", reference.cloud.meta.steps_evolved);
    table.set("eps_ref", cfg.reference.eps_ref);
    table.set("dt_ref", cfg.reference.dt_ref);
    table.finish();
    let mut outcome = Outcome::new(table);
    outcome.add_cloud("ref", &reference.cloud)?;
    for (tag, c) in &out_clouds {
        outcome.add_cloud(tag, c)?;
    }
    Ok(outcome)
}
