use bhl_core::attractor::sample_ball;
use bhl_core::implicit::StepConfig;
use bhl_core::reference::{global_error_state, local_error_state};
use bhl_core::{LatticeWindow, Space};
use rayon::prelude::*;

use super::Outcome;
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::table::ResultTable;

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// One-step and global discretization errors against RK4 references with
/// `dt_ref = eps / order_ref_divisions`.
pub fn run_error_order(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    let p = cfg.params()?;
    let c = p.derived_constants()?;
    let st = &cfg.study;
    let ys = sample_ball::<LatticeWindow<f64>>(
        c.r_star,
        Space::Window {
            half_width: st.order_half_width,
        },
        st.order_samples,
        cfg.seed(4),
    )?;
    let eps_list = &cfg.grids.eps_list;
    let jobs: Vec<(usize, usize)> = (0..eps_list.len())
        .flat_map(|e| (0..ys.len()).map(move |y| (e, y)))
        .collect();
    let errors = jobs
        .par_iter()
        .map(|&(e, y)| -> Result<(f64, f64)> {
            let eps = eps_list[e];
            let sc = StepConfig {
                fp_tol: st.order_fp_tol,
                window: st.window,
                ..StepConfig::new(eps)
            };
            let dt_ref = eps / st.order_ref_divisions as f64;
            let y0 = &ys.points()[y];
            let local = local_error_state(&p, &sc, y0, dt_ref)?;
            let global = global_error_state(&p, &sc, y0, st.order_horizon, dt_ref)?;
            Ok((local, global))
        })
        .collect::<Result<Vec<_>>>()?;

    let (l0, l1, m0) = (c.l_of_r(c.r_star), c.l_of_r(c.r_star + 1.0), c.m_of_r(c.r_star));
    let t = st.order_horizon;
    let mut table = ResultTable::new(
        "error_order",
        cfg,
        &[
            "eps",
            "local_mean",
            "local_max",
            "global_mean",
            "global_max",
            "local_bound",
            "global_bound",
        ],
    );
    let n = ys.len();
    let mut bounds_ok = true;
    let mut log_local = Vec::new();
    let mut log_global = Vec::new();
    for (e, &eps) in eps_list.iter().enumerate() {
        let row = &errors[e * n..(e + 1) * n];
        let local_bound = l0 * m0 * l1 * eps * eps;
        let global_bound = 0.5 * m0 * (l0 * t).exp() * eps;
        bounds_ok &= row.iter().all(|&(l, g)| l <= local_bound && g <= global_bound);
        let mean = |k: fn(&(f64, f64)) -> f64| row.iter().map(k).sum::<f64>() / n as f64;
        let max = |k: fn(&(f64, f64)) -> f64| row.iter().map(k).fold(0.0, f64::max);
        // geometric means feed the slope fit
        log_local.push(row.iter().map(|r| r.0.ln()).sum::<f64>() / n as f64);
        log_global.push(row.iter().map(|r| r.1.ln()).sum::<f64>() / n as f64);
        table.push_row(&[
            eps,
            mean(|r| r.0),
            max(|r| r.0),
            mean(|r| r.1),
            max(|r| r.1),
            local_bound,
            global_bound,
        ]);
    }
    let geo = |v: &[f64]| v.iter().map(|x| x.exp()).collect::<Vec<_>>();
    let local_slope = loglog_slope(eps_list, &geo(&log_local));
    let global_slope = loglog_slope(eps_list, &geo(&log_global));
    table.set("local_slope", local_slope);
    table.set("global_slope", global_slope);
    table.set("bounds_ok", bounds_ok);
    table.set("horizon", t);
    table.set("samples", n);
    table.set("ref_divisions", st.order_ref_divisions);
    table.finish();
    Ok(Outcome::new(table))
}
