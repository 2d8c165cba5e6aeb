//! Continuous-time reference solutions produced by the classical
//! fourth-order Runge-Kutta method, and the one-step / global discretization
//! errors of the implicit scheme measured against them.

use crate::error::{Error, Result};
use crate::implicit::{step_state, trajectory_state, StepConfig};
use crate::lattice::{LatticeWindow, Params};
use crate::scalar::Real;
use crate::state::{LatticeState, WindowPolicy};

/// One classical RK4 step of the (possibly nonautonomous) field `rhs(t, u)`.
pub fn rk4_step<T: Real, S: LatticeState<Scalar = T>>(
    u: &S,
    t: T,
    dt: T,
    policy: &WindowPolicy,
    rhs: impl Fn(T, &S) -> S,
) -> S {
    let two = T::lit(2.0);
    let half = dt / two;
    let k1 = rhs(t, u);
    let k2 = rhs(t + half, &u.axpy(half, &k1));
    let k3 = rhs(t + half, &u.axpy(half, &k2));
    let k4 = rhs(t + dt, &u.axpy(dt, &k3));
    let sixth = dt / T::lit(6.0);
    let third = dt / T::lit(3.0);
    let mut next = u.axpy(sixth, &k1).axpy(third, &k2).axpy(third, &k3).axpy(sixth, &k4);
    next.tidy(policy);
    next
}

/// Number of whole steps of size `dt` in `t`; errors if `t` is not a multiple.
pub fn step_count<T: Real>(t: T, dt: T) -> Result<usize> {
    if !(dt > T::zero()) {
        return Err(Error::InvalidParameter(format!("step size {dt} must be positive")));
    }
    if t < T::zero() {
        return Err(Error::InvalidParameter(format!("horizon {t} must be nonnegative")));
    }
    let n = (t / dt).round();
    let slack = T::lit(1e-9) * t.max(dt);
    if (n * dt - t).abs() > slack {
        return Err(Error::InvalidParameter(format!(
            "horizon {t} is not a multiple of the step {dt}"
        )));
    }
    n.to_usize()
        .ok_or_else(|| Error::InvalidParameter(format!("step count for {t}/{dt}")))
}

/// Approximates `u(t, u0)` for the autonomous lattice system in any state space.
pub fn flow_state<T: Real, S: LatticeState<Scalar = T>>(
    p: &Params<T>,
    u0: &S,
    t: T,
    dt: T,
    policy: &WindowPolicy,
) -> Result<S> {
    let n = step_count(t, dt)?;
    let mut u = u0.clone();
    let mut time = T::zero();
    for k in 0..n {
        u = rk4_step(&u, time, dt, policy, |_, v: &S| v.field(p));
        if !u.is_finite() {
            return Err(Error::NonFinite(format!("reference flow after step {}", k + 1)));
        }
        time = time + dt;
    }
    Ok(u)
}

/// Reference solution `u(t, u0)` of the lattice system with step `dt_ref`.
pub fn reference_flow<T: Real>(p: &Params<T>, u0: &LatticeWindow<T>, t: T, dt_ref: T) -> Result<LatticeWindow<T>> {
    if let Ok(c) = p.derived_constants() {
        if dt_ref > c.eps_star / T::lit(10.0) {
            log::warn!("dt_ref = {dt_ref} exceeds eps*/10 = {}", c.eps_star / T::lit(10.0));
        }
    }
    flow_state(p, u0, t, dt_ref, &WindowPolicy::default())
}

/// `||u(eps, y) - u_1^eps(y)||`: one implicit step against the reference flow
/// over the same interval.
pub fn local_error_state<T: Real, S: LatticeState<Scalar = T>>(
    p: &Params<T>,
    cfg: &StepConfig<T>,
    y: &S,
    dt_ref: T,
) -> Result<T> {
    let consts = p.derived_constants()?;
    let discrete = step_state(p, &consts, cfg, y)?.state;
    let exact = flow_state(p, y, cfg.eps, dt_ref, &cfg.window)?;
    Ok(exact.distance(&discrete))
}

/// `||u(T, y) - u_{T/eps}^eps(y)||`.
pub fn global_error_state<T: Real, S: LatticeState<Scalar = T>>(
    p: &Params<T>,
    cfg: &StepConfig<T>,
    y: &S,
    horizon: T,
    dt_ref: T,
) -> Result<T> {
    let n = step_count(horizon, cfg.eps)?;
    let discrete = trajectory_state(p, cfg, y, n)?;
    let exact = flow_state(p, y, horizon, dt_ref, &cfg.window)?;
    Ok(exact.distance(discrete.last()))
}

/// Solver tolerance used by [`local_error`] and [`global_error`].
pub const ERROR_STUDY_TOL: f64 = 1e-13;

pub fn local_error<T: Real>(p: &Params<T>, eps: T, y: &LatticeWindow<T>, dt_ref: T) -> Result<T> {
    let cfg = StepConfig::new(eps).with_tol(T::lit(ERROR_STUDY_TOL));
    local_error_state(p, &cfg, y, dt_ref)
}

pub fn global_error<T: Real>(
    p: &Params<T>,
    eps: T,
    y: &LatticeWindow<T>,
    horizon: T,
    dt_ref: T,
) -> Result<T> {
    let cfg = StepConfig::new(eps).with_tol(T::lit(ERROR_STUDY_TOL));
    global_error_state(p, &cfg, y, horizon, dt_ref)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> Params<f64> {
        Params::new(1.0, 1.0, 1.0, 0.5, 8.0, LatticeWindow::zero()).unwrap()
    }

    #[test]
    fn zero_horizon_returns_initial_state() {
        let u0 = LatticeWindow::new(-2, vec![0.1, 0.2, 0.3]).unwrap();
        let out = reference_flow(&params(), &u0, 0.0, 1e-3).unwrap();
        assert_eq!(out.offset(), u0.offset());
        assert_eq!(out.values(), u0.values());
    }

    #[test]
    fn horizon_must_be_multiple_of_step() {
        assert_eq!(step_count(0.1, 0.01).unwrap(), 10);
        assert_eq!(step_count(0.2, 0.0025).unwrap(), 80);
        assert!(step_count(0.105, 0.01).is_err());
        assert!(step_count(0.1, 0.0).is_err());
    }

    #[test]
    fn errors_vanish_at_the_rest_state() {
        let p = params();
        let z = LatticeWindow::zero();
        assert_eq!(local_error(&p, 0.01, &z, 1e-4).unwrap(), 0.0);
        assert_eq!(global_error(&p, 0.01, &z, 0.1, 1e-4).unwrap(), 0.0);
    }

    #[test]
    fn blow_up_is_reported() {
        let p = params();
        let u0 = LatticeWindow::scaled_unit(0, 50.0);
        assert!(matches!(
            reference_flow(&p, &u0, 5.0, 0.5),
            Err(Error::NonFinite(_))
        ));
    }
}
