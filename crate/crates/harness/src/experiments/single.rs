use bhl_core::attractor::{cloud_norm, sample_ball, CloudCodec};
use bhl_core::implicit::{step_residual, trajectory_state};
use bhl_core::stochastic::{derive_seed, ergodic_average, ou_path};
use bhl_core::{LatticeState, LatticeWindow, Params, Space, TruncatedState};

use super::{discrete_attractor, step_config, window_space, Outcome};
use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::table::ResultTable;

fn simulate_in<S: LatticeState<Scalar = f64>>(
    p: &Params<f64>,
    cfg: &ExperimentConfig,
    eps: f64,
    steps: usize,
    space: Space,
) -> Result<ResultTable> {
    let c = p.derived_constants()?;
    let start = sample_ball::<S>(c.r_star, space, 1, cfg.seed(6))?;
    let traj = trajectory_state(p, &step_config(cfg, eps), &start.points()[0], steps)?;
    let mut table = ResultTable::new("simulate", cfg, &["n", "t", "norm", "iterations", "increment", "residual"]);
    for (n, u) in traj.states.iter().enumerate() {
        let (it, inc, res) = if n == 0 {
            (0.0, 0.0, 0.0)
        } else {
            (
                traj.iterations[n - 1] as f64,
                traj.increments[n - 1],
                step_residual(p, eps, &traj.states[n - 1], u),
            )
        };
        table.push_row(&[n as f64, n as f64 * eps, u.norm(), it, inc, res]);
    }
    table.set("eps", eps);
    table.set("eps_star", c.eps_star);
    table.set("r_star", c.r_star);
    table.set("space", space);
    Ok(table)
}

/// Implicit-Euler orbit of one point of `B_{r*}`.
pub fn run_simulate(
    cfg: &ExperimentConfig,
    eps: Option<f64>,
    steps: Option<usize>,
    m: Option<usize>,
) -> Result<Outcome> {
    cfg.validate()?;
    let p = cfg.params()?;
    let eps = eps.unwrap_or(cfg.study.simulate_eps);
    let steps = steps.unwrap_or(cfg.study.simulate_steps);
    let mut table = match m {
        Some(m) => simulate_in::<TruncatedState<f64>>(&p, cfg, eps, steps, Space::Truncated { m })?,
        None => simulate_in::<LatticeWindow<f64>>(&p, cfg, eps, steps, window_space(cfg))?,
    };
    table.finish();
    Ok(Outcome::new(table))
}

fn attractor_in<S: CloudCodec + LatticeState<Scalar = f64>>(
    p: &Params<f64>,
    cfg: &ExperimentConfig,
    eps: f64,
    space: Space,
    tag: &str,
) -> Result<Outcome> {
    let run = discrete_attractor::<S>(p, cfg, eps, space, cfg.seed(7))?;
    let mut table = ResultTable::new("attractor", cfg, &["round", "distance"]);
    for (k, d) in run.round_distances.iter().enumerate() {
        table.push_row(&[(k + 1) as f64, *d]);
    }
    table.set("eps", eps);
    table.set("space", space);
    table.set("norm", cloud_norm(&run.cloud));
    table.set("points", run.cloud.len());
    table.set("steps", run.cloud.meta.steps_evolved);
    table.finish();
    let mut outcome = Outcome::new(table);
    outcome.add_cloud(tag, &run.cloud)?;
    Ok(outcome)
}

/// One attractor surrogate, written as `cloud_<tag>.json`, with the
/// stabilization history as the table.
pub fn run_attractor(cfg: &ExperimentConfig, eps: Option<f64>, m: Option<usize>) -> Result<Outcome> {
    cfg.validate()?;
    let p = cfg.params()?;
    let eps = eps.unwrap_or(cfg.grids.eps_list[0]);
    match m {
        Some(m) => attractor_in::<TruncatedState<f64>>(&p, cfg, eps, Space::Truncated { m }, &format!("eps_{eps}_m{m}")),
        None => attractor_in::<LatticeWindow<f64>>(&p, cfg, eps, window_space(cfg), &format!("eps_{eps}")),
    }
}

/// OU path of realization `index` on `[t_min, 0]`, as a table and as JSON.
pub fn run_ou_path(cfg: &ExperimentConfig, index: u64, t_min: Option<f64>, h: Option<f64>) -> Result<Outcome> {
    let t_min = t_min.unwrap_or(-cfg.noise.pullback_t);
    let h = h.unwrap_or(cfg.noise.h_path);
    let seed = derive_seed(cfg.noise_at(0.0).master_seed, index);
    let path = ou_path(seed, t_min, 0.0, h).map_err(|e| HarnessError::Config(e.to_string()))?;
    let mut table = ResultTable::new("ou_path", cfg, &["t", "z"]);
    for (j, &z) in path.z.iter().enumerate() {
        table.push_row(&[path.time(j), z]);
    }
    let n = path.len() as f64;
    let mean = path.z.iter().sum::<f64>() / n;
    let var = path.z.iter().map(|z| (z - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    table.set("seed", seed);
    table.set("realization", index);
    table.set("sample_mean", mean);
    table.set("sample_variance", var);
    table.set("ergodic_average", ergodic_average(&path));
    table.finish();
    let mut outcome = Outcome::new(table);
    outcome.files.push((format!("ou_path_{index}.json"), path.to_json()?));
    Ok(outcome)
}
