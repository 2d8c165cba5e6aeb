//! Common interface of the two state spaces (windowed `l^2` and the
//! truncated `R^{2m+1}`), so that steppers, integrators and attractor tools
//! are written once.

use core::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::lattice::{window_field, Kernel, LatticeWindow, Params};
use crate::scalar::Real;
use crate::truncation::{
    null_expansion, truncated_force_norm, truncated_jacobian, truncated_kernel_field, TruncatedState,
};

/// Clipping applied to windowed states after every update.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WindowPolicy {
    /// Largest retained index magnitude `K`.
    pub max_half_width: i64,
    /// Leading and trailing components with magnitude at or below this are dropped.
    pub edge_tol: f64,
}

impl Default for WindowPolicy {
    fn default() -> Self {
        Self {
            max_half_width: 128,
            edge_tol: 1e-30,
        }
    }
}

/// Clipped squared mass above which a warning is logged.
pub const CLIP_WARN_MASS: f64 = 1e-14;

/// Where a state lives: a window of half-width `K`, or `R^{2m+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "lowercase")]
pub enum Space {
    Window { half_width: usize },
    Truncated { m: usize },
}

impl Space {
    /// Number of coordinates of a point sampled in this space.
    pub fn dimension(self) -> usize {
        match self {
            Space::Window { half_width } => 2 * half_width + 1,
            Space::Truncated { m } => 2 * m + 1,
        }
    }
}

pub trait LatticeState: Clone + Debug + Send + Sync + 'static {
    type Scalar: Real;

    /// Builds a state from `dimension` coordinates ordered by site index.
    fn from_coords(space: Space, coords: Vec<Self::Scalar>) -> Self;

    fn norm(&self) -> Self::Scalar;

    fn distance(&self, other: &Self) -> Self::Scalar;

    /// `self + a * x`.
    fn axpy(&self, a: Self::Scalar, x: &Self) -> Self;

    fn scale(&self, c: Self::Scalar) -> Self;

    fn is_finite(&self) -> bool;

    /// Deterministic field.
    fn field(&self, p: &Params<Self::Scalar>) -> Self;

    /// Transformed random field at noise intensity `sigma` and OU value `z`.
    fn random_field(&self, p: &Params<Self::Scalar>, sigma: Self::Scalar, z: Self::Scalar) -> Self;

    /// `||f||` as seen by this space.
    fn force_norm(&self, p: &Params<Self::Scalar>) -> Self::Scalar;

    /// Applies the window policy; a no-op for fixed-dimension states.
    fn tidy(&mut self, policy: &WindowPolicy);

    /// Solves `(I - eps DF(self)) delta = rhs`; `None` on a vanishing pivot.
    fn solve_linearized(&self, p: &Params<Self::Scalar>, eps: Self::Scalar, rhs: &Self) -> Option<Self>;

    /// Embedding into the windowed sequence space.
    fn to_window(&self) -> LatticeWindow<Self::Scalar>;

    /// Whether distances between the two states are defined.
    fn same_space(&self, other: &Self) -> bool;

    /// Short human-readable description of the space.
    fn space_label(&self) -> String;
}

impl<T: Real> LatticeState for LatticeWindow<T> {
    type Scalar = T;

    fn from_coords(space: Space, coords: Vec<T>) -> Self {
        let half = match space {
            Space::Window { half_width } => half_width,
            Space::Truncated { m } => m,
        } as i64;
        debug_assert_eq!(coords.len() as i64, 2 * half + 1);
        LatticeWindow::from_raw(-half, coords)
    }

    fn norm(&self) -> T {
        LatticeWindow::norm(self)
    }

    fn distance(&self, other: &Self) -> T {
        LatticeWindow::distance(self, other)
    }

    fn axpy(&self, a: T, x: &Self) -> Self {
        LatticeWindow::axpy(self, a, x)
    }

    fn scale(&self, c: T) -> Self {
        LatticeWindow::scale(self, c)
    }

    fn is_finite(&self) -> bool {
        LatticeWindow::is_finite(self)
    }

    fn field(&self, p: &Params<T>) -> Self {
        window_field(&Kernel::deterministic(p), self, &p.f)
    }

    fn random_field(&self, p: &Params<T>, sigma: T, z: T) -> Self {
        window_field(&Kernel::random(p, sigma, z), self, &p.f)
    }

    fn force_norm(&self, p: &Params<T>) -> T {
        p.f_norm()
    }

    fn tidy(&mut self, policy: &WindowPolicy) {
        self.trim(T::lit(policy.edge_tol));
        let clipped = self.clamp(policy.max_half_width);
        if clipped.as_f64() > CLIP_WARN_MASS {
            log::warn!(
                "window clamp at K = {} discarded tail mass {:e}",
                policy.max_half_width,
                clipped.as_f64()
            );
        }
    }

    fn solve_linearized(&self, p: &Params<T>, eps: T, rhs: &Self) -> Option<Self> {
        if rhs.is_empty() {
            return Some(LatticeWindow::zero());
        }
        let k = Kernel::deterministic(p);
        let lo = rhs.offset();
        let n = rhs.len();
        let mut lower = Vec::with_capacity(n);
        let mut diag = Vec::with_capacity(n);
        let mut upper = Vec::with_capacity(n);
        for j in 0..n as i64 {
            let i = lo + j;
            let (dl, dc, dr) = k.partials(self.get(i - 1), self.get(i));
            lower.push(-eps * dl);
            diag.push(T::one() - eps * dc);
            upper.push(-eps * dr);
        }
        let delta = solve_tridiagonal(&lower, &diag, &upper, rhs.values())?;
        Some(LatticeWindow::from_raw(lo, delta))
    }

    fn to_window(&self) -> LatticeWindow<T> {
        self.clone()
    }

    fn same_space(&self, _other: &Self) -> bool {
        true
    }

    fn space_label(&self) -> String {
        "window".into()
    }
}

impl<T: Real> LatticeState for TruncatedState<T> {
    type Scalar = T;

    fn from_coords(space: Space, coords: Vec<T>) -> Self {
        let m = match space {
            Space::Truncated { m } => m,
            Space::Window { half_width } => half_width,
        };
        TruncatedState::from_raw(m, coords)
    }

    fn norm(&self) -> T {
        TruncatedState::norm(self)
    }

    fn distance(&self, other: &Self) -> T {
        TruncatedState::distance(self, other)
    }

    fn axpy(&self, a: T, x: &Self) -> Self {
        TruncatedState::axpy(self, a, x)
    }

    fn scale(&self, c: T) -> Self {
        TruncatedState::scale(self, c)
    }

    fn is_finite(&self) -> bool {
        TruncatedState::is_finite(self)
    }

    fn field(&self, p: &Params<T>) -> Self {
        truncated_kernel_field(&Kernel::deterministic(p), self, &p.f)
    }

    fn random_field(&self, p: &Params<T>, sigma: T, z: T) -> Self {
        truncated_kernel_field(&Kernel::random(p, sigma, z), self, &p.f)
    }

    fn force_norm(&self, p: &Params<T>) -> T {
        truncated_force_norm(p, self.m())
    }

    fn tidy(&mut self, _policy: &WindowPolicy) {}

    fn solve_linearized(&self, p: &Params<T>, eps: T, rhs: &Self) -> Option<Self> {
        let (l, d, u) = truncated_jacobian(&Kernel::deterministic(p), self);
        let lower: Vec<T> = l.into_iter().map(|v| -eps * v).collect();
        let diag: Vec<T> = d.into_iter().map(|v| T::one() - eps * v).collect();
        let upper: Vec<T> = u.into_iter().map(|v| -eps * v).collect();
        let delta = solve_tridiagonal(&lower, &diag, &upper, rhs.values())?;
        Some(TruncatedState::from_raw(self.m(), delta))
    }

    fn to_window(&self) -> LatticeWindow<T> {
        null_expansion(self)
    }

    fn same_space(&self, other: &Self) -> bool {
        self.m() == other.m()
    }

    fn space_label(&self) -> String {
        format!("truncated(m={})", self.m())
    }
}

/// Thomas algorithm for a tridiagonal system. `lower[0]` and
/// `upper[n-1]` are ignored.
pub(crate) fn solve_tridiagonal<T: Real>(lower: &[T], diag: &[T], upper: &[T], rhs: &[T]) -> Option<Vec<T>> {
    let n = diag.len();
    let mut c = vec![T::zero(); n];
    let mut d = vec![T::zero(); n];
    let mut pivot = diag[0];
    if pivot == T::zero() || !pivot.is_finite() {
        return None;
    }
    c[0] = upper[0] / pivot;
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - lower[i] * c[i - 1];
        if pivot == T::zero() || !pivot.is_finite() {
            return None;
        }
        c[i] = upper[i] / pivot;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        d[i] = d[i] - c[i] * d[i + 1];
    }
    Some(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thomas_matches_hand_solution() {
        // [[4,1,0],[1,4,1],[0,1,4]] x = [5,6,5] -> x = [1,1,1]
        let x = solve_tridiagonal(&[0.0, 1.0, 1.0], &[4.0, 4.0, 4.0], &[1.0, 1.0, 0.0], &[5.0, 6.0, 5.0])
            .unwrap();
        for v in x {
            assert!((v - 1.0f64).abs() < 1e-15);
        }
        assert!(solve_tridiagonal(&[0.0], &[0.0f64], &[0.0], &[1.0]).is_none());
    }

    #[test]
    fn space_dimensions() {
        assert_eq!(Space::Window { half_width: 4 }.dimension(), 9);
        assert_eq!(Space::Truncated { m: 1 }.dimension(), 3);
    }
}
