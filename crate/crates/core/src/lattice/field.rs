//! Pointwise evaluation of the (deterministic and transformed random)
//! Burgers-Huxley field.

use super::params::Params;
use super::window::LatticeWindow;
use crate::scalar::Real;

/// Coefficients of one field evaluation at a fixed noise value.
///
/// With `a = e^{sigma z}` the row at site `i` reads
/// `nu L u - alpha a u D-u + beta u (1 - a u)(a u - gamma) - lambda u + f / a + sigma z u`,
/// which is the random field with its cubic and quadratic reaction terms
/// grouped. `a = 1, drift = 0` is the deterministic field.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Kernel<T> {
    nu: T,
    sign: T,
    alpha: T,
    beta: T,
    gamma: T,
    lambda: T,
    a: T,
    inv_a: T,
    drift: T,
}

impl<T: Real> Kernel<T> {
    pub(crate) fn deterministic(p: &Params<T>) -> Self {
        Self {
            nu: p.nu,
            sign: p.laplacian_sign.factor(),
            alpha: p.alpha,
            beta: p.beta,
            gamma: p.gamma,
            lambda: p.lambda,
            a: T::one(),
            inv_a: T::one(),
            drift: T::zero(),
        }
    }

    pub(crate) fn random(p: &Params<T>, sigma: T, z: T) -> Self {
        let sz = sigma * z;
        Self {
            a: sz.exp(),
            inv_a: (-sz).exp(),
            drift: sz,
            ..Self::deterministic(p)
        }
    }

    /// Field row from the neighbours `l = u_{i-1}`, `c = u_i`, `r = u_{i+1}`
    /// and the forcing component `f = f_i`.
    #[inline]
    pub(crate) fn row(&self, l: T, c: T, r: T, f: T) -> T {
        self.row_with_laplacian(-l + T::lit(2.0) * c - r, l, c, f)
    }

    /// Same as [`Kernel::row`] with the unsigned Laplacian row `lap` given.
    #[inline]
    pub(crate) fn row_with_laplacian(&self, lap: T, l: T, c: T, f: T) -> T {
        let lap = self.sign * lap;
        let ac = self.a * c;
        self.nu * lap - self.alpha * self.a * c * (l - c)
            + self.beta * c * (T::one() - ac) * (ac - self.gamma)
            - self.lambda * c
            + self.inv_a * f
            + self.drift * c
    }

    /// Partial derivatives of [`Kernel::row`] with respect to `(l, c, r)`.
    #[inline]
    pub(crate) fn partials(&self, l: T, c: T) -> (T, T, T) {
        let two = T::lit(2.0);
        let ac = self.a * c;
        let reaction = self.beta
            * ((T::one() - ac) * (ac - self.gamma) - self.a * c * (ac - self.gamma)
                + self.a * c * (T::one() - ac));
        let d_left = -self.nu * self.sign - self.alpha * self.a * c;
        let d_centre = two * self.nu * self.sign - self.alpha * self.a * (l - two * c) + reaction
            - self.lambda
            + self.drift;
        let d_right = -self.nu * self.sign;
        (d_left, d_centre, d_right)
    }

    /// `nu * sign`, the diffusion weight of one Laplacian entry.
    #[inline]
    pub(crate) fn diffusion(&self) -> T {
        self.nu * self.sign
    }
}

pub(crate) fn window_field<T: Real>(k: &Kernel<T>, u: &LatticeWindow<T>, f: &LatticeWindow<T>) -> LatticeWindow<T> {
    let (lo, hi) = match (u.is_empty(), f.is_empty()) {
        (true, true) => return LatticeWindow::zero(),
        (true, false) => (f.offset(), f.end()),
        (false, true) => (u.offset() - 1, u.end() + 1),
        (false, false) => (
            (u.offset() - 1).min(f.offset()),
            (u.end() + 1).max(f.end()),
        ),
    };
    let values = (lo..hi)
        .map(|i| k.row(u.get(i - 1), u.get(i), u.get(i + 1), f.get(i)))
        .collect();
    LatticeWindow::from_raw(lo, values)
}

/// `F u = nu L u - alpha u D-u + beta u (1 - u)(u - gamma) - lambda u + f`,
/// products taken componentwise.
pub fn vector_field<T: Real>(p: &Params<T>, u: &LatticeWindow<T>) -> LatticeWindow<T> {
    window_field(&Kernel::deterministic(p), u, &p.f)
}

/// Directional derivative `DF(u) v`.
pub fn vector_field_jvp<T: Real>(p: &Params<T>, u: &LatticeWindow<T>, v: &LatticeWindow<T>) -> LatticeWindow<T> {
    window_jvp(&Kernel::deterministic(p), u, v)
}

pub(crate) fn window_jvp<T: Real>(k: &Kernel<T>, u: &LatticeWindow<T>, v: &LatticeWindow<T>) -> LatticeWindow<T> {
    if v.is_empty() {
        return LatticeWindow::zero();
    }
    let lo = v.offset() - 1;
    let hi = v.end() + 1;
    let values = (lo..hi)
        .map(|i| {
            let (dl, dc, dr) = k.partials(u.get(i - 1), u.get(i));
            dl * v.get(i - 1) + dc * v.get(i) + dr * v.get(i + 1)
        })
        .collect();
    LatticeWindow::from_raw(lo, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LaplacianSign;

    #[test]
    fn field_at_zero_is_force() {
        let f = LatticeWindow::new(-1, vec![0.25, -0.5]).unwrap();
        let p = Params::new(1.0, 1.0, 1.0, 0.5, 8.0, f.clone()).unwrap();
        assert_eq!(vector_field(&p, &LatticeWindow::zero()), f);
    }

    #[test]
    fn field_at_unit() {
        let p = Params::new(1.0, 1.0, 1.0, 0.5, 7.0, LatticeWindow::zero()).unwrap();
        let out = vector_field(&p, &LatticeWindow::unit(0));
        assert_eq!(out, LatticeWindow::new(-1, vec![-1.0, -4.0, -1.0]).unwrap());
    }

    #[test]
    fn continuum_sign_flips_diffusion_only() {
        let p = Params::new(1.0, 1.0, 1.0, 0.5, 7.0, LatticeWindow::zero())
            .unwrap()
            .with_laplacian_sign(LaplacianSign::Continuum);
        let out = vector_field(&p, &LatticeWindow::unit(0));
        // -2 from diffusion, +1 advection, -7 damping
        assert_eq!(out, LatticeWindow::new(-1, vec![1.0, -8.0, 1.0]).unwrap());
    }
}
