//! Convergence studies, bound sweeps and the single-run subcommands.

mod bounds;
mod dim;
mod eps;
mod noise;
mod order;
mod single;

pub use bounds::run_bounds;
pub use dim::run_dim_convergence;
pub use eps::run_eps_convergence;
pub use noise::run_noise_convergence;
pub use order::{loglog_slope, run_error_order};
pub use single::{run_attractor, run_ou_path, run_simulate};

use bhl_core::attractor::{
    attractor_approx, cloud_to_json, flow_stepper, implicit_stepper, AttractorConfig, AttractorRun, CloudCodec,
    PointCloud,
};
use bhl_core::implicit::StepConfig;
use bhl_core::{Error, LatticeState, Params, Space};
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::table::{Format, ResultTable};

/// A table plus auxiliary files (`cloud_<tag>.json`, paths) to write next to it.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub table: ResultTable,
    pub files: Vec<(String, String)>,
}

impl Outcome {
    pub fn new(table: ResultTable) -> Self {
        Self {
            table,
            files: Vec::new(),
        }
    }

    pub fn add_cloud<S: CloudCodec>(&mut self, tag: &str, cloud: &PointCloud<S>) -> Result<()> {
        self.files.push((format!("cloud_{tag}.json"), cloud_to_json(cloud)?));
        Ok(())
    }

    /// Writes the table, its meta file and the auxiliary files into `dir`.
    pub fn write(&self, dir: &Path, format: Format, cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
        let (data, meta) = self.table.write(dir, format, cfg)?;
        let mut written = vec![data, meta];
        for (name, body) in &self.files {
            let path = dir.join(name);
            fs::write(&path, body).map_err(|e| HarnessError::io(format!("writing {}", path.display()), e))?;
            written.push(path);
        }
        Ok(written)
    }
}

/// `next <= (1 + rel) prev + floor` for every adjacent pair.
pub fn trend_nonincreasing(values: &[f64], rel: f64, floor: f64) -> bool {
    values.windows(2).all(|w| w[1] <= (1.0 + rel) * w[0] + floor)
}

pub(crate) fn step_config(cfg: &ExperimentConfig, eps: f64) -> StepConfig<f64> {
    StepConfig {
        fp_tol: cfg.study.fp_tol,
        window: cfg.study.window,
        ..StepConfig::new(eps)
    }
}

pub(crate) fn window_space(cfg: &ExperimentConfig) -> Space {
    Space::Window {
        half_width: cfg.study.sample_half_width,
    }
}

fn tag_meta<S: LatticeState>(run: &mut AttractorRun<S>, cfg: &ExperimentConfig, eps: f64, space: Space) {
    let meta = &mut run.cloud.meta;
    meta.eps = Some(eps);
    meta.m = match space {
        Space::Truncated { m } => Some(m),
        Space::Window { .. } => None,
    };
    meta.config_hash = Some(cfg.hash());
}

fn with_seed(cfg: &ExperimentConfig, seed: u64) -> AttractorConfig {
    AttractorConfig {
        seed,
        ..cfg.attractor.clone()
    }
}

/// Implicit-Euler attractor `A^eps` (window) or `A^eps_m` (truncated),
/// sampled from `B_{r*}`.
pub fn discrete_attractor<S: CloudCodec + LatticeState<Scalar = f64>>(
    p: &Params<f64>,
    cfg: &ExperimentConfig,
    eps: f64,
    space: Space,
    seed: u64,
) -> Result<AttractorRun<S>> {
    let consts = p.derived_constants()?;
    let stepper = implicit_stepper::<f64, S>(p, step_config(cfg, eps))?;
    let ac = with_seed(cfg, seed);
    let burn = ac.burn_in_for(eps, consts.gap);
    let mut run = attractor_approx(&stepper, &ac, burn, consts.r_star, space).map_err(|e| {
        let e = Error::from(e);
        log::error!("attractor at eps = {eps} in {space:?}: {e}");
        e
    })?;
    tag_meta(&mut run, cfg, eps, space);
    Ok(run)
}

/// Attractor of the continuous flow through its time-`eps_ref` map.
pub fn reference_attractor<S: CloudCodec + LatticeState<Scalar = f64>>(
    p: &Params<f64>,
    cfg: &ExperimentConfig,
    space: Space,
    seed: u64,
) -> Result<AttractorRun<S>> {
    let consts = p.derived_constants()?;
    let r = &cfg.reference;
    let stepper = flow_stepper::<f64, S>(p, r.eps_ref, r.dt_ref, cfg.study.window)?;
    let ac = with_seed(cfg, seed);
    let burn = ac.burn_in_for(r.eps_ref, consts.gap);
    let mut run = attractor_approx(&stepper, &ac, burn, consts.r_star, space).map_err(|e| {
        let e = Error::from(e);
        log::error!("reference attractor in {space:?}: {e}");
        e
    })?;
    tag_meta(&mut run, cfg, r.eps_ref, space);
    Ok(run)
}
