use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cloud::{sample_ball, CloudMeta, PointCloud};
use super::hausdorff::hausdorff_sym;
use crate::error::{Error, Result};
use crate::implicit::{step_state, StepConfig};
use crate::lattice::Params;
use crate::reference::{rk4_step, step_count};
use crate::scalar::Real;
use crate::state::{LatticeState, Space, WindowPolicy};

/// Controls for the evolve-until-stable attractor surrogate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AttractorConfig {
    pub sample_count: usize,
    /// Steps before the first snapshot. When absent,
    /// [`default_burn_in`] is used by the callers that know `eps`.
    #[serde(default)]
    pub burn_in: Option<u64>,
    /// Steps between compared snapshots.
    pub stabilization_gap: u64,
    /// Rounds stop once consecutive snapshots are this close (symmetric Hausdorff).
    pub stabilization_tol: f64,
    pub max_rounds: usize,
    pub seed: u64,
    /// Keep every snapshot in [`AttractorRun::snapshots`].
    #[serde(default)]
    pub keep_snapshots: bool,
}

impl Default for AttractorConfig {
    fn default() -> Self {
        Self {
            sample_count: 256,
            burn_in: None,
            stabilization_gap: 20,
            stabilization_tol: 1e-7,
            max_rounds: 200,
            seed: 0,
            keep_snapshots: false,
        }
    }
}

impl AttractorConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(format!("attractor config: {what} must be positive")));
        if self.sample_count == 0 {
            return bad("sample_count");
        }
        if self.burn_in == Some(0) {
            return bad("burn_in");
        }
        if self.stabilization_gap == 0 {
            return bad("stabilization_gap");
        }
        if !(self.stabilization_tol > 0.0) {
            return bad("stabilization_tol");
        }
        if self.max_rounds == 0 {
            return bad("max_rounds");
        }
        Ok(())
    }

    /// Burn-in to use for step `eps` and dissipation gap `lambda - lambda*`.
    pub fn burn_in_for(&self, eps: f64, gap: f64) -> u64 {
        self.burn_in.unwrap_or_else(|| default_burn_in(eps, gap))
    }
}

/// `ceil(20 / (eps (lambda - lambda*)))`: twenty e-foldings of the
/// absorbing-ball contraction.
pub fn default_burn_in(eps: f64, gap: f64) -> u64 {
    (20.0 / (eps * gap)).ceil().max(1.0) as u64
}

/// Result of [`attractor_approx`].
#[derive(Debug, Clone)]
pub struct AttractorRun<S> {
    pub cloud: PointCloud<S>,
    /// Symmetric Hausdorff distance between consecutive snapshots.
    pub round_distances: Vec<f64>,
    /// Cloud after burn-in and after every round, when requested.
    pub snapshots: Vec<PointCloud<S>>,
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum AttractorError<S: LatticeState> {
    #[error(transparent)]
    Step(#[from] Error),
    /// Rounds ran out; the last cloud is kept for inspection.
    #[error("cloud did not stabilize after {rounds} rounds (last distance {last_distance:e})")]
    NotStabilized {
        last_distance: f64,
        rounds: usize,
        cloud: Box<PointCloud<S>>,
    },
}

impl<S: LatticeState> From<AttractorError<S>> for Error {
    fn from(e: AttractorError<S>) -> Self {
        match e {
            AttractorError::Step(e) => e,
            AttractorError::NotStabilized {
                last_distance, rounds, ..
            } => Error::NotStabilized { last_distance, rounds },
        }
    }
}

/// Applies `n` steps to every point, in parallel over points.
pub fn evolve_cloud<S, F>(cloud: &PointCloud<S>, stepper: &F, n: u64) -> Result<PointCloud<S>>
where
    S: LatticeState,
    F: Fn(&S) -> Result<S> + Sync,
{
    let points = cloud
        .points()
        .par_iter()
        .map(|p| {
            let mut u = p.clone();
            for _ in 0..n {
                u = stepper(&u)?;
            }
            Ok(u)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut meta = cloud.meta.clone();
    meta.steps_evolved += n;
    Ok(PointCloud::from_raw(points, meta))
}

/// Evolves `initial` by `burn_in` steps, then by `stabilization_gap` steps
/// per round until two consecutive snapshots are within `stabilization_tol`.
pub fn attractor_from_cloud<S, F>(
    stepper: &F,
    cfg: &AttractorConfig,
    burn_in: u64,
    initial: PointCloud<S>,
) -> Result<AttractorRun<S>, AttractorError<S>>
where
    S: LatticeState,
    F: Fn(&S) -> Result<S> + Sync,
{
    cfg.validate()?;
    let mut current = evolve_cloud(&initial, stepper, burn_in)?;
    let mut snapshots = Vec::new();
    let mut round_distances = Vec::new();
    if cfg.keep_snapshots {
        snapshots.push(current.clone());
    }
    for _ in 0..cfg.max_rounds {
        let next = evolve_cloud(&current, stepper, cfg.stabilization_gap)?;
        let d = hausdorff_sym(&current, &next)?.as_f64();
        round_distances.push(d);
        if cfg.keep_snapshots {
            snapshots.push(next.clone());
        }
        current = next;
        if d < cfg.stabilization_tol {
            return Ok(AttractorRun {
                cloud: current,
                round_distances,
                snapshots,
            });
        }
    }
    Err(AttractorError::NotStabilized {
        last_distance: round_distances.last().copied().unwrap_or(f64::INFINITY),
        rounds: cfg.max_rounds,
        cloud: Box::new(current),
    })
}

/// Attractor surrogate started from `sample_count` points of the ball of
/// radius `ball_radius` in `space`.
pub fn attractor_approx<S, F>(
    stepper: &F,
    cfg: &AttractorConfig,
    burn_in: u64,
    ball_radius: S::Scalar,
    space: Space,
) -> Result<AttractorRun<S>, AttractorError<S>>
where
    S: LatticeState,
    F: Fn(&S) -> Result<S> + Sync,
{
    cfg.validate()?;
    let initial = sample_ball(ball_radius, space, cfg.sample_count, cfg.seed)?;
    attractor_from_cloud(stepper, cfg, burn_in, initial)
}

/// One implicit Euler step as a stepper closure; constants are computed once.
pub fn implicit_stepper<T: Real, S: LatticeState<Scalar = T>>(
    p: &Params<T>,
    cfg: StepConfig<T>,
) -> Result<impl Fn(&S) -> Result<S> + Sync + '_> {
    let consts = p.derived_constants()?;
    cfg.validate()?;
    Ok(move |u: &S| step_state(p, &consts, &cfg, u).map(|o| o.state))
}

/// Time-`period` map of the continuous flow, integrated by RK4 with step `dt`.
pub fn flow_stepper<T: Real, S: LatticeState<Scalar = T>>(
    p: &Params<T>,
    period: T,
    dt: T,
    policy: WindowPolicy,
) -> Result<impl Fn(&S) -> Result<S> + Sync + '_> {
    let n = step_count(period, dt)?;
    Ok(move |u: &S| {
        let mut v = u.clone();
        for _ in 0..n {
            v = rk4_step(&v, T::zero(), dt, &policy, |_, w: &S| w.field(p));
        }
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite("reference flow".into()))
        }
    })
}

/// Provenance for a cloud produced by an implicit-Euler run.
pub fn implicit_meta(eps: f64, space: Space, seed: u64) -> CloudMeta {
    CloudMeta {
        eps: Some(eps),
        m: match space {
            Space::Truncated { m } => Some(m),
            Space::Window { .. } => None,
        },
        seed,
        ..CloudMeta::default()
    }
}
