use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ou::{derive_seed, ou_path, OUPath};
use crate::attractor::PointCloud;
use crate::error::{Error, Result};
use crate::lattice::Params;
use crate::reference::{rk4_step, step_count};
use crate::scalar::Real;
use crate::state::{LatticeState, WindowPolicy};

/// Integrator for the pathwise random system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PullbackMethod {
    #[default]
    Rk4,
    /// Picard-solved implicit Euler with the noise frozen at the new time.
    ImplicitEuler,
}

/// Noise settings of one random experiment. `sigma` is the multiplicative
/// noise intensity, kept apart from the time step `eps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseConfig {
    pub sigma: f64,
    pub h_path: f64,
    pub pullback_t: f64,
    pub realizations: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub method: PullbackMethod,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            sigma: 0.1,
            h_path: 0.01,
            pullback_t: 16.0,
            realizations: 20,
            master_seed: 0,
            method: PullbackMethod::Rk4,
        }
    }
}

impl NoiseConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::InvalidParameter(format!("sigma = {}", self.sigma)));
        }
        if !(self.h_path > 0.0) {
            return Err(Error::InvalidParameter(format!("h_path = {}", self.h_path)));
        }
        if !(self.pullback_t > 0.0) {
            return Err(Error::InvalidParameter(format!("pullback_t = {}", self.pullback_t)));
        }
        if self.realizations == 0 {
            return Err(Error::InvalidParameter("realizations must be positive".into()));
        }
        Ok(())
    }

    /// OU path of realization `index` on `[-pullback_t, 0]`.
    pub fn path(&self, index: u64) -> Result<OUPath> {
        ou_path(derive_seed(self.master_seed, index), -self.pullback_t, 0.0, self.h_path)
    }
}

const IMPLICIT_TOL: f64 = 1e-12;
const IMPLICIT_MAX_ITER: usize = 200;

fn implicit_random_step<T: Real, S: LatticeState<Scalar = T>>(
    p: &Params<T>,
    sigma: T,
    z: T,
    dt: T,
    policy: &WindowPolicy,
    u_prev: &S,
) -> Result<S> {
    let mut y = u_prev.clone();
    for _ in 0..IMPLICIT_MAX_ITER {
        let mut next = u_prev.axpy(dt, &y.random_field(p, sigma, z));
        next.tidy(policy);
        let inc = next.distance(&y);
        y = next;
        if !inc.is_finite() {
            break;
        }
        if inc <= T::lit(IMPLICIT_TOL) {
            return Ok(y);
        }
    }
    Err(Error::NoConvergence {
        iterations: IMPLICIT_MAX_ITER,
        residual: f64::NAN,
    })
}

/// Integrates `dU/dt = G(t, U)` with `z(t)` linearly interpolated from
/// `path`, from `path.t_min` to `path.t_max`.
pub fn pullback_point<T: Real, S: LatticeState<Scalar = T>>(
    p: &Params<T>,
    sigma: T,
    path: &OUPath,
    dt: T,
    method: PullbackMethod,
    policy: &WindowPolicy,
    u0: &S,
) -> Result<S> {
    let n = step_count(T::lit(path.horizon()), dt)?;
    let t0 = path.t_min;
    let dt64 = dt.as_f64();
    let mut u = u0.clone();
    for k in 0..n {
        let t = t0 + k as f64 * dt64;
        u = match method {
            PullbackMethod::Rk4 => rk4_step(&u, T::lit(t), dt, policy, |s, v: &S| {
                v.random_field(p, sigma, T::lit(path.value_at(s.as_f64())))
            }),
            PullbackMethod::ImplicitEuler => {
                let z = T::lit(path.value_at(t + dt64));
                implicit_random_step(p, sigma, z, dt, policy, &u)?
            }
        };
        if !u.is_finite() {
            return Err(Error::NonFinite(format!("pullback step {} at t = {t}", k + 1)));
        }
    }
    Ok(u)
}

/// Evolves every point of `initial` along `path` in parallel.
pub fn pullback_along<T: Real, S: LatticeState<Scalar = T>>(
    p: &Params<T>,
    sigma: f64,
    path: &OUPath,
    dt: T,
    method: PullbackMethod,
    initial: &PointCloud<S>,
) -> Result<PointCloud<S>> {
    let consts = p.derived_constants()?;
    if dt > consts.eps_star {
        return Err(Error::StepTooLarge {
            eps: dt.as_f64(),
            eps_star: consts.eps_star.as_f64(),
        });
    }
    path.validate()?;
    let policy = WindowPolicy::default();
    let s = T::lit(sigma);
    let points = initial
        .points()
        .par_iter()
        .map(|u| pullback_point(p, s, path, dt, method, &policy, u))
        .collect::<Result<Vec<_>>>()?;
    let mut meta = initial.meta.clone();
    meta.sigma = Some(sigma);
    meta.seed = path.seed;
    meta.pullback_t = Some(path.horizon());
    meta.steps_evolved += step_count(path.horizon(), dt.as_f64())? as u64;
    PointCloud::new(points, meta)
}

/// Time-zero section of the pullback flow for realization
/// `realization_index`: a sample of the random attractor.
pub fn pullback_sample<T: Real, S: LatticeState<Scalar = T>>(
    p: &Params<T>,
    noise: &NoiseConfig,
    realization_index: u64,
    dt: T,
    initial: &PointCloud<S>,
) -> Result<PointCloud<S>> {
    noise.validate()?;
    let path = noise.path(realization_index)?;
    pullback_along(p, noise.sigma, &path, dt, noise.method, initial)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attractor::{cloud_norm, hausdorff_sym, sample_ball};
    use crate::lattice::LatticeWindow;
    use crate::reference::flow_state;
    use crate::state::Space;
    use crate::truncation::TruncatedState;

    fn params() -> Params<f64> {
        Params::new(1.0, 1.0, 1.0, 0.5, 8.0, LatticeWindow::scaled_unit(0, 0.25)).unwrap()
    }

    #[test]
    fn zero_noise_matches_deterministic_flow() {
        let p = params();
        let noise = NoiseConfig {
            sigma: 0.0,
            pullback_t: 1.0,
            ..NoiseConfig::default()
        };
        let cloud = sample_ball::<TruncatedState<f64>>(1.0, Space::Truncated { m: 3 }, 4, 2).unwrap();
        let out = pullback_sample(&p, &noise, 0, 0.005, &cloud).unwrap();
        for (a, b) in cloud.points().iter().zip(out.points()) {
            let det = flow_state(&p, a, 1.0, 0.005, &WindowPolicy::default()).unwrap();
            assert!(det.distance(b) <= 1e-12);
        }
        assert_eq!(out.meta.sigma, Some(0.0));
        assert_eq!(out.meta.pullback_t, Some(1.0));
    }

    #[test]
    fn oversize_step_rejected() {
        let p = params();
        let cloud = PointCloud::singleton(TruncatedState::<f64>::zeros(1));
        let r = pullback_sample(&p, &NoiseConfig::default(), 0, 0.5, &cloud);
        assert!(matches!(r, Err(Error::StepTooLarge { .. })));
    }

    #[test]
    fn implicit_mode_tracks_rk4() {
        let p = params();
        let noise = NoiseConfig {
            sigma: 0.2,
            pullback_t: 4.0,
            ..NoiseConfig::default()
        };
        let cloud = sample_ball::<TruncatedState<f64>>(1.0, Space::Truncated { m: 2 }, 3, 5).unwrap();
        let a = pullback_sample(&p, &noise, 1, 0.01, &cloud).unwrap();
        let implicit = NoiseConfig {
            method: PullbackMethod::ImplicitEuler,
            ..noise
        };
        let b = pullback_sample(&p, &implicit, 1, 0.01, &cloud).unwrap();
        assert!(hausdorff_sym(&a, &b).unwrap() < 0.02 * cloud_norm(&a).max(1e-3));
    }
}
