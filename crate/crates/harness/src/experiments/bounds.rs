use bhl_core::attractor::cloud_norm;
use bhl_core::{LatticeWindow, Space, TruncatedState};

use super::{discrete_attractor, window_space, Outcome};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::table::ResultTable;

/// Attractor norms against `||f|| / (lambda - lambda*)` over force scalings
/// and damping values.
pub fn run_bounds(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    let base = cfg.params()?;
    let eps = cfg.study.bounds_eps;
    let m = cfg.study.bounds_m;
    let tol = cfg.attractor.stabilization_tol;
    let seed = cfg.seed(5);
    let mut table = ResultTable::new(
        "bounds",
        cfg,
        &["scale", "lambda", "f_norm", "bound", "norm_window", "norm_truncated"],
    );
    let mut bound_ok = true;
    let mut zero_ok = true;
    let mut lambda_trend_ok = true;
    for &c in &cfg.grids.force_scales {
        let mut prev: Option<(f64, f64)> = None;
        for &lambda in &cfg.grids.lambda_list {
            let p = base.clone().with_force(base.f.scale(c)).with_lambda(lambda);
            let consts = p.derived_constants()?;
            let bound = p.f_norm() / consts.gap;
            let w = discrete_attractor::<LatticeWindow<f64>>(&p, cfg, eps, window_space(cfg), seed)?;
            let t = discrete_attractor::<TruncatedState<f64>>(&p, cfg, eps, Space::Truncated { m }, seed)?;
            let (nw, nt) = (cloud_norm(&w.cloud), cloud_norm(&t.cloud));
            bound_ok &= nw <= bound + 2.0 * tol && nt <= bound + 2.0 * tol;
            if c == 0.0 {
                zero_ok &= nw <= 1e-6 && nt <= 1e-6;
            }
            if let Some((pw, pt)) = prev {
                lambda_trend_ok &= nw <= pw + tol && nt <= pt + tol;
            }
            prev = Some((nw, nt));
            table.push_row(&[c, lambda, p.f_norm(), bound, nw, nt]);
        }
    }
    table.set("eps", eps);
    table.set("m", m);
    table.set("slack", 2.0 * tol);
    table.set("bound_ok", bound_ok);
    table.set("zero_force_ok", zero_ok);
    table.set("lambda_trend_ok", lambda_trend_ok);
    table.set("lambda_trend_floor", tol);
    table.finish();
    Ok(Outcome::new(table))
}
