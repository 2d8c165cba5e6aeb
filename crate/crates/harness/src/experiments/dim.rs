use bhl_core::attractor::{cloud_norm, hausdorff_semi, tail_profile};
use bhl_core::{LatticeWindow, Space, TruncatedState};

use super::{discrete_attractor, trend_nonincreasing, window_space, Outcome};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::table::ResultTable;

/// Distance of the null-expanded truncated attractors to the windowed
/// attractor, over the truncation grid.
pub fn run_dim_convergence(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    let p = cfg.params()?;
    let eps = cfg.study.dim_eps;
    let seed = cfg.seed(1);
    let full = discrete_attractor::<LatticeWindow<f64>>(&p, cfg, eps, window_space(cfg), seed)?;
    let mut table = ResultTable::new("converge_dim", cfg, &["m", "distance", "tail", "norm", "steps"]);
    let mut clouds = Vec::new();
    for &m in &cfg.grids.m_list {
        let run = discrete_attractor::<TruncatedState<f64>>(&p, cfg, eps, Space::Truncated { m }, seed)?;
        let expanded = run.cloud.to_window_cloud();
        table.push_row(&[
            m as f64,
            hausdorff_semi(&expanded, &full.cloud)?,
            tail_profile(&run.cloud, (m / 2) as u64),
            cloud_norm(&run.cloud),
            run.cloud.meta.steps_evolved as f64,
        ]);
        clouds.push((format!("m_{m}"), run.cloud));
    }
    let d = table.column("distance").unwrap_or_default().to_vec();
    let tails = table.column("tail").unwrap_or_default();
    let (rel, floor) = (cfg.study.trend_slack, cfg.trend_floor());
    let tail_last = tails.last().copied().unwrap_or(f64::NAN);
    table.set("eps", eps);
    table.set("window_half_width", cfg.study.window.max_half_width);
    table.set("trend_slack", rel);
    table.set("trend_floor", floor);
    table.set("trend_ok", trend_nonincreasing(&d, rel, floor));
    table.set("tail_delta", cfg.study.tail_delta);
    table.set("tail_ok", tail_last <= cfg.study.tail_delta);
    table.set("window_norm", cloud_norm(&full.cloud));
    table.finish();
    let mut outcome = Outcome::new(table);
    outcome.add_cloud("window", &full.cloud)?;
    for (tag, c) in &clouds {
        outcome.add_cloud(tag, c)?;
    }
    Ok(outcome)
}
