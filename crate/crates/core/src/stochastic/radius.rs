use serde::{Deserialize, Serialize};

use super::ou::OUPath;
use crate::error::{Error, Result};
use crate::lattice::Params;
use crate::scalar::Real;

/// Random absorbing radius with error diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusEstimate {
    pub value: f64,
    /// Estimated contribution of `(-inf, t_min)`, left out of `value`.
    pub truncation_estimate: f64,
    /// Leading trapezoid error `(a h)^2 / 12` relative to the integral term.
    pub discretization_estimate: f64,
}

/// `R = 1 + (||f||^2 / a) int_{-inf}^0 exp(-2 sigma z(s) - int_0^s 2 sigma z(r) dr + a s) ds`
/// with `a = lambda - lambda*`, by the trapezoid rule on the path grid.
///
/// The inner integral is accumulated by a running trapezoid from `s = 0`
/// backwards. The path must end at `t = 0` and reach back far enough that
/// `e^{a t_min} <= quad_tol`.
pub fn absorbing_radius<T: Real>(p: &Params<T>, sigma: f64, path: &OUPath, quad_tol: f64) -> Result<RadiusEstimate> {
    let consts = p.derived_constants()?;
    let a = consts.gap.as_f64();
    let f2 = p.f_norm().as_f64().powi(2);
    if f2 == 0.0 {
        return Ok(RadiusEstimate {
            value: 1.0,
            truncation_estimate: 0.0,
            discretization_estimate: 0.0,
        });
    }
    if !(quad_tol > 0.0 && quad_tol < 1.0) {
        return Err(Error::InvalidParameter(format!("quad_tol = {quad_tol}")));
    }
    path.validate()?;
    if path.t_max.abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "radius path must end at t = 0, got {}",
            path.t_max
        )));
    }
    let needed = -quad_tol.ln() / a;
    if path.horizon() < needed {
        return Err(Error::HorizonTooShort {
            needed,
            available: path.horizon(),
        });
    }
    let h = path.h;
    let n = path.len();
    // walk from s = 0 backwards; `inner` is int_s^0 2 sigma z dr
    let mut inner = 0.0;
    let mut integral = 0.0;
    let mut prev = None;
    let mut g_min = 0.0;
    for k in 0..n {
        let j = n - 1 - k;
        if k > 0 {
            inner += sigma * h * (path.z[j] + path.z[j + 1]);
        }
        let s = path.time(j);
        let g = (-2.0 * sigma * path.z[j] + inner + a * s).exp();
        if let Some(gp) = prev {
            integral += 0.5 * h * (g + gp);
        }
        prev = Some(g);
        g_min = g;
    }
    let prefactor = f2 / a;
    Ok(RadiusEstimate {
        value: 1.0 + prefactor * integral,
        truncation_estimate: prefactor * g_min / a,
        discretization_estimate: prefactor * integral * (a * h).powi(2) / 12.0,
    })
}
