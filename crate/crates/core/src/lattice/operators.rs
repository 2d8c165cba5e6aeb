//! First differences and the discrete Laplacian on `l^2`.
//!
//! Every operator here widens the stored support by at most one index on
//! each side.

use serde::{Deserialize, Serialize};

use super::window::LatticeWindow;
use crate::scalar::Real;

/// Orientation of the discrete Laplacian.
///
/// `Paper` is `(Lu)_i = -u_{i-1} + 2u_i - u_{i+1}` verbatim. `Continuum`
/// flips the sign so that `L` approximates the second derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LaplacianSign {
    #[default]
    Paper,
    Continuum,
}

impl LaplacianSign {
    #[inline]
    pub fn factor<T: Real>(self) -> T {
        match self {
            LaplacianSign::Paper => T::one(),
            LaplacianSign::Continuum => -T::one(),
        }
    }
}

fn stencil<T: Real>(u: &LatticeWindow<T>, g: impl Fn(T, T, T) -> T) -> LatticeWindow<T> {
    if u.is_empty() {
        return LatticeWindow::zero();
    }
    let first = u.offset() - 1;
    let last = u.end();
    let values = (first..=last)
        .map(|i| g(u.get(i - 1), u.get(i), u.get(i + 1)))
        .collect();
    LatticeWindow::from_raw(first, values)
}

/// `(D+ u)_i = u_{i+1} - u_i`.
pub fn d_plus<T: Real>(u: &LatticeWindow<T>) -> LatticeWindow<T> {
    stencil(u, |_, c, r| r - c)
}

/// `(D- u)_i = u_{i-1} - u_i`.
pub fn d_minus<T: Real>(u: &LatticeWindow<T>) -> LatticeWindow<T> {
    stencil(u, |l, c, _| l - c)
}

/// `(L u)_i = -u_{i-1} + 2u_i - u_{i+1}`.
pub fn laplacian<T: Real>(u: &LatticeWindow<T>) -> LatticeWindow<T> {
    laplacian_signed(u, LaplacianSign::Paper)
}

pub fn laplacian_signed<T: Real>(u: &LatticeWindow<T>, sign: LaplacianSign) -> LatticeWindow<T> {
    let two = T::lit(2.0);
    let s: T = sign.factor();
    stencil(u, |l, c, r| s * (-l + two * c - r))
}

#[cfg(test)]
mod tests {
    use super::*;

    type W = LatticeWindow<f64>;

    #[test]
    fn laplacian_of_unit() {
        let out = laplacian(&W::unit(0));
        assert_eq!(out.offset(), -1);
        assert_eq!(out.values(), &[-1.0, 2.0, -1.0]);
        let flipped = laplacian_signed(&W::unit(0), LaplacianSign::Continuum);
        assert_eq!(flipped.values(), &[1.0, -2.0, 1.0]);
    }

    #[test]
    fn differences_of_zero_and_unit() {
        assert!(d_plus(&W::zero()).is_empty());
        let dp = d_plus(&W::unit(0));
        assert_eq!(dp, W::new(-1, vec![1.0, -1.0]).unwrap());
        let dm = d_minus(&W::unit(0));
        assert_eq!(dm, W::new(0, vec![-1.0, 1.0]).unwrap());
    }

    #[test]
    fn support_grows_by_one() {
        let u = W::new(3, vec![1.0, 2.0]).unwrap();
        for out in [d_plus(&u), d_minus(&u), laplacian(&u)] {
            assert_eq!(out.offset(), 2);
            assert_eq!(out.len(), 4);
        }
    }
}
