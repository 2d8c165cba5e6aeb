use std::path::{Path, PathBuf};

use bhl_core::attractor::AttractorConfig;
use bhl_core::lattice::{LaplacianSign, ParamsSpec};
use bhl_core::stochastic::{derive_seed, NoiseConfig};
use bhl_core::{Params, WindowPolicy};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{HarnessError, Result};

/// Gap `lambda - lambda*` of the default coefficients.
pub const DEFAULT_GAP: f64 = 1.4375;

/// Forcing amplitude on site 0 used by default: one sixteenth of the gap,
/// which keeps `eps* > 0.02` so the whole default step grid is admissible.
pub const DEFAULT_FORCE: f64 = DEFAULT_GAP / 16.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Grids {
    pub eps_list: Vec<f64>,
    pub m_list: Vec<usize>,
    pub sigma_list: Vec<f64>,
    /// Damping values of the bounds sweep, ascending.
    pub lambda_list: Vec<f64>,
    /// Forcing scalings of the bounds sweep.
    pub force_scales: Vec<f64>,
}

impl Default for Grids {
    fn default() -> Self {
        Self {
            eps_list: vec![0.02, 0.01, 0.005, 0.0025],
            m_list: vec![8, 16, 32],
            sigma_list: vec![0.4, 0.2, 0.1, 0.05, 0.0],
            lambda_list: vec![8.0, 10.0, 12.0],
            force_scales: vec![1.0, 0.5, 0.25, 0.0],
        }
    }
}

/// Fine continuous-time reference: the flow map over `eps_ref`, integrated
/// with RK4 at `dt_ref`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReferenceConfig {
    pub eps_ref: f64,
    pub dt_ref: f64,
}

impl Default for ReferenceConfig {
    fn default() -> Self {
        Self {
            eps_ref: 0.0005,
            dt_ref: 0.0005,
        }
    }
}

/// Knobs of the individual studies. Slack parameters are echoed into
/// every table that uses them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StudyConfig {
    pub window: WindowPolicy,
    /// Half-width of the window in which initial clouds are sampled.
    pub sample_half_width: usize,
    pub fp_tol: f64,
    /// Relative slack of the monotone trend checks.
    pub trend_slack: f64,
    /// Absolute slack of the monotone trend checks; defaults to the
    /// attractor stabilization tolerance when absent.
    pub trend_floor: Option<f64>,
    /// Tail threshold `delta` of the dimension study.
    pub tail_delta: f64,
    /// Step of the dimension study.
    pub dim_eps: f64,
    /// Step and truncation of the bounds sweep.
    pub bounds_eps: f64,
    pub bounds_m: usize,
    /// Error-order study: number of initial states, their sampling window
    /// and the horizon of the global error.
    pub order_samples: usize,
    pub order_half_width: usize,
    pub order_horizon: f64,
    /// Reference steps per implicit step (`dt_ref = eps / order_ref_divisions`).
    pub order_ref_divisions: usize,
    pub order_fp_tol: f64,
    /// Noise study: truncation, cloud size, integrator step and radius quadrature tolerance.
    pub noise_m: usize,
    pub noise_cloud: usize,
    pub noise_dt: f64,
    pub quad_tol: f64,
    /// `simulate` subcommand.
    pub simulate_eps: f64,
    pub simulate_steps: usize,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            window: WindowPolicy::default(),
            sample_half_width: 8,
            fp_tol: 1e-10,
            trend_slack: 0.1,
            trend_floor: None,
            tail_delta: 1e-6,
            dim_eps: 0.01,
            bounds_eps: 0.01,
            bounds_m: 16,
            order_samples: 8,
            order_half_width: 4,
            order_horizon: 0.2,
            order_ref_divisions: 100,
            order_fp_tol: 1e-13,
            noise_m: 8,
            noise_cloud: 8,
            noise_dt: 0.002,
            quad_tol: 1e-6,
            simulate_eps: 0.01,
            simulate_steps: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub params: ParamsSpec,
    pub grids: Grids,
    pub attractor: AttractorConfig,
    pub noise: NoiseConfig,
    pub reference: ReferenceConfig,
    pub study: StudyConfig,
    pub output_dir: PathBuf,
    pub master_seed: u64,
}

pub fn default_params() -> ParamsSpec {
    ParamsSpec {
        nu: 1.0,
        alpha: 1.0,
        beta: 1.0,
        gamma: 0.5,
        lambda: 8.0,
        f_offset: 0,
        f: vec![DEFAULT_FORCE],
        laplacian_sign: LaplacianSign::Paper,
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            params: default_params(),
            grids: Grids::default(),
            attractor: AttractorConfig::default(),
            noise: NoiseConfig {
                pullback_t: 16.0,
                ..NoiseConfig::default()
            },
            reference: ReferenceConfig::default(),
            study: StudyConfig::default(),
            output_dir: PathBuf::from("out"),
            master_seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("reading {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| HarnessError::Config(e.to_string()))
    }

    /// Same configuration with the zero force.
    pub fn unforced(&self) -> Self {
        let mut c = self.clone();
        c.params.f.clear();
        c
    }

    pub fn params(&self) -> Result<Params<f64>> {
        self.params.build::<f64>().map_err(|e| HarnessError::Config(e.to_string()))
    }

    /// Seed of the `stream`-th random draw of an experiment.
    pub fn seed(&self, stream: u64) -> u64 {
        derive_seed(self.master_seed, self.attractor.seed.wrapping_add(stream))
    }

    pub fn trend_floor(&self) -> f64 {
        self.study.trend_floor.unwrap_or(self.attractor.stabilization_tol)
    }

    /// Noise settings of the configuration, with the master seed applied.
    pub fn noise_at(&self, sigma: f64) -> NoiseConfig {
        NoiseConfig {
            sigma,
            master_seed: derive_seed(self.master_seed, self.noise.master_seed),
            ..self.noise.clone()
        }
    }

    /// Checks the grid invariants. Dissipativity is left to the
    /// experiments so that `verify` can report it as a check.
    pub fn validate(&self) -> Result<()> {
        let cfg = |msg: String| Err(HarnessError::Config(msg));
        let p = self.params()?;
        self.attractor.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        self.noise.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        let g = &self.grids;
        if g.eps_list.is_empty() || g.eps_list.iter().any(|&e| !(e > 0.0)) {
            return cfg("eps_list must hold positive steps".into());
        }
        if let Ok(c) = p.derived_constants() {
            if let Some(&e) = g.eps_list.iter().find(|&&e| e > c.eps_star) {
                return cfg(format!("eps = {e} exceeds eps* = {}", c.eps_star));
            }
        }
        if g.m_list.is_empty() || g.m_list.windows(2).any(|w| w[0] >= w[1]) || g.m_list[0] == 0 {
            return cfg("m_list must be positive and strictly ascending".into());
        }
        let k = self.study.window.max_half_width as usize;
        if *g.m_list.last().unwrap_or(&0) >= k {
            return cfg(format!("max(m_list) must stay below the window half-width {k}"));
        }
        if g.sigma_list.is_empty()
            || g.sigma_list.windows(2).any(|w| w[0] <= w[1])
            || g.sigma_list.iter().any(|&s| !(s >= 0.0))
        {
            return cfg("sigma_list must be nonnegative and strictly descending".into());
        }
        if g.lambda_list.windows(2).any(|w| w[0] >= w[1]) {
            return cfg("lambda_list must be strictly ascending".into());
        }
        let min_eps = g.eps_list.iter().copied().fold(f64::INFINITY, f64::min);
        if !(self.reference.eps_ref < min_eps / 4.0) || !(self.reference.dt_ref > 0.0) {
            return cfg(format!("eps_ref must be positive and below min(eps_list)/4 = {}", min_eps / 4.0));
        }
        if self.study.sample_half_width as i64 > self.study.window.max_half_width {
            return cfg("sample_half_width exceeds the window half-width".into());
        }
        Ok(())
    }

    /// `sha256` of the canonical JSON form, lowercase hex.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("configuration serializes");
        hex_digest(canonical.as_bytes())
    }
}

pub fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = ExperimentConfig::default();
        c.validate().unwrap();
        let consts = c.params().unwrap().derived_constants().unwrap();
        assert!(consts.eps_star >= 0.02);
        assert_eq!(consts.r_star, 1.0625);
    }

    #[test]
    fn toml_round_trip_and_partial_files() {
        let c = ExperimentConfig::default();
        let back = ExperimentConfig::from_toml(&c.to_toml().unwrap()).unwrap();
        assert_eq!(back, c);
        let partial = ExperimentConfig::from_toml("master_seed = 9\n[grids]\nm_list = [4, 8]\n").unwrap();
        assert_eq!(partial.master_seed, 9);
        assert_eq!(partial.grids.m_list, vec![4, 8]);
        assert_eq!(partial.grids.eps_list, c.grids.eps_list);
        assert!(ExperimentConfig::from_toml("bogus = 1").is_err());
    }

    #[test]
    fn invalid_grids() {
        let mut c = ExperimentConfig::default();
        c.grids.m_list = vec![16, 8];
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::default();
        c.grids.eps_list = vec![0.05];
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::default();
        c.reference.eps_ref = 0.001;
        assert!(c.validate().is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.master_seed = 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
