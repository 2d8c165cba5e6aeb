//! Implicit Euler scheme `u_n = u_{n-1} + eps F(u_n)`.
//!
//! Each step solves for the fixed point of `Phi(y) = u_{n-1} + eps F(y)`.
//! For `eps <= eps*` the map is a contraction on `B_{r*+1}` with factor
//! `eps L_{r*+1} <= L_{r*+1} / (1 + L_{r*+1})`, so plain Picard iteration
//! from `y_0 = u_{n-1}` converges.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{DerivedConstants, LatticeWindow, Params};
use crate::scalar::Real;
use crate::state::{LatticeState, WindowPolicy};
use crate::truncation::TruncatedState;

/// Inner solver for the implicit relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    /// Fixed-point iteration of `Phi`; covered by the contraction argument.
    #[default]
    Picard,
    /// Newton iteration with the tridiagonal Jacobian. Intended for steps
    /// beyond `eps*`, where no convergence guarantee is available.
    Newton,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepConfig<T> {
    /// Time step.
    pub eps: T,
    /// Stop once successive iterates differ by at most this much.
    pub fp_tol: T,
    pub max_iter: usize,
    /// Reject `eps > eps*` with [`Error::StepTooLarge`].
    pub enforce_eps_star: bool,
    pub solver: Solver,
    pub window: WindowPolicy,
}

impl<T: Real> StepConfig<T> {
    pub fn new(eps: T) -> Self {
        Self {
            eps,
            fp_tol: T::lit(1e-10),
            max_iter: 200,
            enforce_eps_star: true,
            solver: Solver::Picard,
            window: WindowPolicy::default(),
        }
    }

    pub fn with_tol(mut self, fp_tol: T) -> Self {
        self.fp_tol = fp_tol;
        self
    }

    pub fn with_solver(mut self, solver: Solver) -> Self {
        self.solver = solver;
        self
    }

    pub fn unchecked(mut self) -> Self {
        self.enforce_eps_star = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > T::zero()) || !self.eps.is_finite() {
            return Err(Error::InvalidParameter(format!("time step eps = {}", self.eps)));
        }
        if !(self.fp_tol > T::zero()) {
            return Err(Error::InvalidParameter(format!("fp_tol = {}", self.fp_tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// One accepted implicit step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome<S, T> {
    pub state: S,
    /// Number of applications of `Phi` (or Newton updates).
    pub iterations: usize,
    /// Size of the last update; bounds the residual of `state` from above
    /// for the Picard solver, equals it for Newton.
    pub increment: T,
}

/// Predicted Picard iteration cap
/// `ceil(log(fp_tol / (2 r* + 2)) / log(eps L_{r*+1})) + 1`.
pub fn picard_iteration_cap<T: Real>(consts: &DerivedConstants<T>, eps: T, fp_tol: T) -> usize {
    let q = eps * consts.l_of_r(consts.r_star + T::one());
    let two = T::lit(2.0);
    let ratio = (fp_tol / (two * consts.r_star + two)).ln() / q.ln();
    ratio.ceil().to_usize().unwrap_or(usize::MAX).saturating_add(1)
}

/// Residual `||y - u_prev - eps F(y)||` of a candidate step.
pub fn step_residual<T: Real, S: LatticeState<Scalar = T>>(p: &Params<T>, eps: T, u_prev: &S, y: &S) -> T {
    let phi = u_prev.axpy(eps, &y.field(p));
    y.distance(&phi)
}

fn check_step<T: Real, S: LatticeState<Scalar = T>>(
    consts: &DerivedConstants<T>,
    cfg: &StepConfig<T>,
    u_prev: &S,
) -> Result<()> {
    cfg.validate()?;
    if cfg.enforce_eps_star && cfg.eps > consts.eps_star {
        return Err(Error::StepTooLarge {
            eps: cfg.eps.as_f64(),
            eps_star: consts.eps_star.as_f64(),
        });
    }
    if u_prev.norm() > consts.r_star * (T::one() + T::lit(1e-12)) {
        log::warn!(
            "implicit step started outside B_r*: |u| = {} > r* = {}",
            u_prev.norm(),
            consts.r_star
        );
    }
    Ok(())
}

fn picard<T: Real, S: LatticeState<Scalar = T>>(
    p: &Params<T>,
    cfg: &StepConfig<T>,
    u_prev: &S,
) -> Result<StepOutcome<S, T>> {
    let mut y = u_prev.clone();
    let mut increment = T::infinity();
    for k in 1..=cfg.max_iter {
        let mut next = u_prev.axpy(cfg.eps, &y.field(p));
        next.tidy(&cfg.window);
        if !next.is_finite() {
            return Err(Error::NonFinite(format!("Picard iterate {k}")));
        }
        increment = next.distance(&y);
        y = next;
        if increment <= cfg.fp_tol {
            return Ok(StepOutcome {
                state: y,
                iterations: k,
                increment,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: cfg.max_iter,
        residual: increment.as_f64(),
    })
}

fn newton<T: Real, S: LatticeState<Scalar = T>>(
    p: &Params<T>,
    cfg: &StepConfig<T>,
    u_prev: &S,
) -> Result<StepOutcome<S, T>> {
    let mut y = u_prev.clone();
    let mut residual = T::infinity();
    for k in 0..=cfg.max_iter {
        // G(y) = y - u_prev - eps F(y)
        let g = y.axpy(-T::one(), u_prev).axpy(-cfg.eps, &y.field(p));
        residual = g.norm();
        if !residual.is_finite() {
            return Err(Error::NonFinite(format!("Newton iterate {k}")));
        }
        if residual <= cfg.fp_tol {
            return Ok(StepOutcome {
                state: y,
                iterations: k,
                increment: residual,
            });
        }
        if k == cfg.max_iter {
            break;
        }
        let delta = y.solve_linearized(p, cfg.eps, &g).ok_or(Error::NoConvergence {
            iterations: k,
            residual: residual.as_f64(),
        })?;
        y = y.axpy(-T::one(), &delta);
        y.tidy(&cfg.window);
    }
    Err(Error::NoConvergence {
        iterations: cfg.max_iter,
        residual: residual.as_f64(),
    })
}

/// One implicit Euler step in any state space, with precomputed constants.
pub fn step_state<T: Real, S: LatticeState<Scalar = T>>(
    p: &Params<T>,
    consts: &DerivedConstants<T>,
    cfg: &StepConfig<T>,
    u_prev: &S,
) -> Result<StepOutcome<S, T>> {
    check_step(consts, cfg, u_prev)?;
    match cfg.solver {
        Solver::Picard => picard(p, cfg, u_prev),
        Solver::Newton => newton(p, cfg, u_prev),
    }
}

/// One implicit Euler step of the lattice system.
pub fn implicit_step<T: Real>(
    p: &Params<T>,
    cfg: &StepConfig<T>,
    u_prev: &LatticeWindow<T>,
) -> Result<StepOutcome<LatticeWindow<T>, T>> {
    step_state(p, &p.derived_constants()?, cfg, u_prev)
}

/// One implicit Euler step of the truncated system.
pub fn truncated_step<T: Real>(
    p: &Params<T>,
    cfg: &StepConfig<T>,
    x_prev: &TruncatedState<T>,
) -> Result<StepOutcome<TruncatedState<T>, T>> {
    step_state(p, &p.derived_constants()?, cfg, x_prev)
}

/// Orbit `u_0, u_1, ..., u_N` of the discrete semigroup.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<S, T> {
    pub states: Vec<S>,
    /// Solver iterations of step `n` (index `n - 1`).
    pub iterations: Vec<usize>,
    /// Final solver increment of step `n` (index `n - 1`).
    pub increments: Vec<T>,
    pub eps: T,
    pub params_hash: u64,
}

impl<S, T> Trajectory<S, T> {
    pub fn last(&self) -> &S {
        self.states.last().expect("trajectory holds the initial state")
    }
}

/// Opaque fingerprint of a parameter set.
pub fn params_hash<T: Real>(p: &Params<T>) -> u64 {
    let mut h = DefaultHasher::new();
    for c in [p.nu, p.alpha, p.beta, p.gamma, p.lambda] {
        c.as_f64().to_bits().hash(&mut h);
    }
    p.f.offset().hash(&mut h);
    for &v in p.f.values() {
        v.as_f64().to_bits().hash(&mut h);
    }
    (p.laplacian_sign as u8).hash(&mut h);
    h.finish()
}

/// Runs `n_steps` implicit steps in any state space.
pub fn trajectory_state<T: Real, S: LatticeState<Scalar = T>>(
    p: &Params<T>,
    cfg: &StepConfig<T>,
    u0: &S,
    n_steps: usize,
) -> Result<Trajectory<S, T>> {
    let consts = p.derived_constants()?;
    let mut states = Vec::with_capacity(n_steps + 1);
    let mut iterations = Vec::with_capacity(n_steps);
    let mut increments = Vec::with_capacity(n_steps);
    states.push(u0.clone());
    for n in 1..=n_steps {
        let out = step_state(p, &consts, cfg, &states[n - 1]).map_err(|e| Error::StepFailed {
            index: n,
            source: Box::new(e),
        })?;
        states.push(out.state);
        iterations.push(out.iterations);
        increments.push(out.increment);
    }
    Ok(Trajectory {
        states,
        iterations,
        increments,
        eps: cfg.eps,
        params_hash: params_hash(p),
    })
}

pub fn run_trajectory<T: Real>(
    p: &Params<T>,
    cfg: &StepConfig<T>,
    u0: &LatticeWindow<T>,
    n_steps: usize,
) -> Result<Trajectory<LatticeWindow<T>, T>> {
    trajectory_state(p, cfg, u0, n_steps)
}

pub fn truncated_trajectory<T: Real>(
    p: &Params<T>,
    cfg: &StepConfig<T>,
    x0: &TruncatedState<T>,
    n_steps: usize,
) -> Result<Trajectory<TruncatedState<T>, T>> {
    trajectory_state(p, cfg, x0, n_steps)
}
