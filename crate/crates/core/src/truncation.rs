//! The `(2m+1)`-dimensional Dirichlet truncation of the lattice system.
//!
//! Sites outside `[-m, m]` are held at zero. The difference matrices are
//! applied exactly as their printed forms:
//!
//! * `D-_m` is lower bidiagonal, `-1` on the diagonal and `+1` below it;
//! * `D+_m` is upper bidiagonal, `-1` on the diagonal and `+1` above it;
//! * `L_m = D+_m D-_m` is tridiagonal with diagonal `(2, ..., 2, 1)` and
//!   `-1` off the diagonal. The last diagonal entry makes `L_m`
//!   asymmetric at its corners.

use crate::error::{Error, Result};
use crate::lattice::{Kernel, LaplacianSign, LatticeWindow, Params};
use crate::scalar::Real;

/// A vector `(x_{-m}, ..., x_m)` in `R^{2m+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedState<T> {
    m: usize,
    values: Vec<T>,
}

impl<T: Real> TruncatedState<T> {
    pub fn new(m: usize, values: Vec<T>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("truncation half-width m must be positive".into()));
        }
        if values.len() != 2 * m + 1 {
            return Err(Error::InvalidParameter(format!(
                "truncated state for m = {m} needs {} values, got {}",
                2 * m + 1,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("truncated state".into()));
        }
        Ok(Self { m, values })
    }

    pub(crate) fn from_raw(m: usize, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), 2 * m + 1);
        Self { m, values }
    }

    pub fn zeros(m: usize) -> Self {
        Self::from_raw(m, vec![T::zero(); 2 * m + 1])
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Component `x_i` for `i` in `[-m, m]`, zero outside.
    #[inline]
    pub fn get(&self, i: i64) -> T {
        let k = i + self.m as i64;
        if k < 0 || k >= self.values.len() as i64 {
            T::zero()
        } else {
            self.values[k as usize]
        }
    }

    pub fn norm(&self) -> T {
        self.values.iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    pub fn distance(&self, other: &Self) -> T {
        debug_assert_eq!(self.m, other.m);
        self.values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<T>()
            .sqrt()
    }

    pub fn axpy(&self, a: T, x: &Self) -> Self {
        debug_assert_eq!(self.m, x.m);
        let values = self.values.iter().zip(&x.values).map(|(&u, &v)| u + a * v).collect();
        Self::from_raw(self.m, values)
    }

    pub fn scale(&self, c: T) -> Self {
        Self::from_raw(self.m, self.values.iter().map(|&v| c * v).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    fn map_rows(&self, mut row: impl FnMut(i64) -> T) -> Self {
        let m = self.m as i64;
        Self::from_raw(self.m, (-m..=m).map(&mut row).collect())
    }
}

/// `D-_m x`: `(D-_m x)_i = x_{i-1} - x_i` with `x_{-m-1} = 0`.
pub fn d_minus_m<T: Real>(x: &TruncatedState<T>) -> TruncatedState<T> {
    x.map_rows(|i| x.get(i - 1) - x.get(i))
}

/// `D+_m x`: `(D+_m x)_i = x_{i+1} - x_i` with `x_{m+1} = 0`.
pub fn d_plus_m<T: Real>(x: &TruncatedState<T>) -> TruncatedState<T> {
    x.map_rows(|i| x.get(i + 1) - x.get(i))
}

/// Unsigned row `i` of `L_m x`.
#[inline]
fn laplacian_row<T: Real>(x: &TruncatedState<T>, i: i64) -> T {
    let m = x.m as i64;
    if i == m {
        -x.get(i - 1) + x.get(i)
    } else {
        -x.get(i - 1) + T::lit(2.0) * x.get(i) - x.get(i + 1)
    }
}

/// `L_m x` with the printed corner entries.
pub fn laplacian_m<T: Real>(x: &TruncatedState<T>) -> TruncatedState<T> {
    laplacian_m_signed(x, LaplacianSign::Paper)
}

pub fn laplacian_m_signed<T: Real>(x: &TruncatedState<T>, sign: LaplacianSign) -> TruncatedState<T> {
    let s: T = sign.factor();
    x.map_rows(|i| s * laplacian_row(x, i))
}

pub(crate) fn truncated_kernel_field<T: Real>(
    k: &Kernel<T>,
    x: &TruncatedState<T>,
    f: &LatticeWindow<T>,
) -> TruncatedState<T> {
    x.map_rows(|i| k.row_with_laplacian(laplacian_row(x, i), x.get(i - 1), x.get(i), f.get(i)))
}

/// `F_m x = nu L_m x - alpha x D-_m x + beta x (1 - x)(x - gamma) - lambda x + f^m`
/// where `f^m` keeps the forcing components with `|i| <= m`.
pub fn truncated_field<T: Real>(p: &Params<T>, x: &TruncatedState<T>) -> TruncatedState<T> {
    truncated_kernel_field(&Kernel::deterministic(p), x, &p.f)
}

/// Tridiagonal Jacobian rows `(lower, diag, upper)` of the truncated field.
pub(crate) fn truncated_jacobian<T: Real>(
    k: &Kernel<T>,
    x: &TruncatedState<T>,
) -> (Vec<T>, Vec<T>, Vec<T>) {
    let m = x.m as i64;
    let n = x.values.len();
    let mut lower = Vec::with_capacity(n);
    let mut diag = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    for i in -m..=m {
        let (dl, mut dc, dr) = k.partials(x.get(i - 1), x.get(i));
        if i == m {
            // corner entry of L_m is 1 instead of 2
            dc = dc - k.diffusion();
        }
        lower.push(dl);
        diag.push(dc);
        upper.push(dr);
    }
    (lower, diag, upper)
}

/// `||f^m||`, the norm of the forcing restricted to `[-m, m]`.
pub fn truncated_force_norm<T: Real>(p: &Params<T>, m: usize) -> T {
    let m = m as i64;
    p.f.iter()
        .filter(|(i, _)| i.abs() <= m)
        .map(|(_, v)| v * v)
        .sum::<T>()
        .sqrt()
}

/// Zero padding of `x` to a bi-infinite sequence.
pub fn null_expansion<T: Real>(x: &TruncatedState<T>) -> LatticeWindow<T> {
    LatticeWindow::from_raw(-(x.m as i64), x.values.clone())
}

/// Keeps the components of `u` with `|i| <= m`.
pub fn restriction<T: Real>(u: &LatticeWindow<T>, m: usize) -> TruncatedState<T> {
    let mi = m as i64;
    TruncatedState::from_raw(m, (-mi..=mi).map(|i| u.get(i)).collect())
}
