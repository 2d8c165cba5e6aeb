use serde::{Deserialize, Serialize};

use super::operators::LaplacianSign;
use super::window::LatticeWindow;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Coefficients of the Burgers-Huxley lattice field
/// `F u = nu L u - alpha u D-u + beta u (1 - u)(u - gamma) - lambda u + f`.
#[derive(Debug, Clone)]
pub struct Params<T> {
    /// Diffusion coefficient.
    pub nu: T,
    /// Advection coefficient.
    pub alpha: T,
    /// Reaction coefficient.
    pub beta: T,
    /// Reaction threshold, in `(0, 1)`.
    pub gamma: T,
    /// Linear damping.
    pub lambda: T,
    /// External force.
    pub f: LatticeWindow<T>,
    pub laplacian_sign: LaplacianSign,
}

impl<T: Real> Params<T> {
    /// Checks coefficient ranges. Dissipativity (`lambda > lambda*`) is
    /// checked by [`Params::derived_constants`].
    pub fn new(nu: T, alpha: T, beta: T, gamma: T, lambda: T, f: LatticeWindow<T>) -> Result<Self> {
        let p = Self {
            nu,
            alpha,
            beta,
            gamma,
            lambda,
            f,
            laplacian_sign: LaplacianSign::Paper,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_laplacian_sign(mut self, sign: LaplacianSign) -> Self {
        self.laplacian_sign = sign;
        self
    }

    pub fn with_force(mut self, f: LatticeWindow<T>) -> Self {
        self.f = f;
        self
    }

    pub fn with_lambda(mut self, lambda: T) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: T| Error::InvalidParameter(format!("{what} = {v}"));
        for (name, v) in [("nu", self.nu), ("alpha", self.alpha), ("beta", self.beta)] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(bad(name, v));
            }
        }
        if !(self.gamma > T::zero() && self.gamma < T::one()) {
            return Err(bad("gamma", self.gamma));
        }
        if !self.lambda.is_finite() {
            return Err(bad("lambda", self.lambda));
        }
        if !self.f.is_finite() {
            return Err(Error::NonFinite("forcing".into()));
        }
        Ok(())
    }

    pub fn f_norm(&self) -> T {
        self.f.norm()
    }

    pub fn lambda_star(&self) -> T {
        lambda_star_of(self.nu, self.alpha, self.beta, self.gamma)
    }

    pub fn bounds(&self) -> Bounds<T> {
        Bounds {
            nu: self.nu,
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            lambda: self.lambda,
            f_norm: self.f_norm(),
        }
    }

    /// Radius `r*`, admissible step `eps*` and friends.
    ///
    /// Fails with [`Error::DissipativityViolation`] unless `lambda > lambda*`.
    pub fn derived_constants(&self) -> Result<DerivedConstants<T>> {
        let lambda_star = self.lambda_star();
        if !(self.lambda > lambda_star) {
            return Err(Error::DissipativityViolation {
                lambda: self.lambda.as_f64(),
                lambda_star: lambda_star.as_f64(),
            });
        }
        let bounds = self.bounds();
        let gap = self.lambda - lambda_star;
        let r_star = T::one() + bounds.f_norm / gap;
        let r1 = r_star + T::one();
        let eps_star = (T::one() / bounds.m(r1)).min(T::one() / (T::one() + bounds.l(r1)));
        Ok(DerivedConstants {
            lambda_star,
            gap,
            r_star,
            eps_star,
            bounds,
        })
    }
}

/// `lambda* = 4 nu + (2 alpha + beta + beta gamma)^2 / (4 beta) - beta gamma`.
pub fn lambda_star_of<T: Real>(nu: T, alpha: T, beta: T, gamma: T) -> T {
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let c = two * alpha + beta + beta * gamma;
    four * nu + c * c / (four * beta) - beta * gamma
}

/// Growth and Lipschitz bound evaluators `M_r` and `L_r` on the ball `B_r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds<T> {
    pub nu: T,
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
    pub lambda: T,
    pub f_norm: T,
}

impl<T: Real> Bounds<T> {
    /// `M_r = beta r^3 + (2 alpha + beta + beta gamma) r^2 + (4 nu + beta gamma + lambda) r + ||f||`.
    pub fn m(&self, r: T) -> T {
        let two = T::lit(2.0);
        let four = T::lit(4.0);
        self.beta * r * r * r
            + (two * self.alpha + self.beta + self.beta * self.gamma) * r * r
            + (four * self.nu + self.beta * self.gamma + self.lambda) * r
            + self.f_norm
    }

    /// `L_r = 4 nu + 2 sqrt(5) r alpha + sqrt(12 r^2 (1+gamma)^2 + 27 r^4 + 3 gamma^2) beta + lambda`.
    pub fn l(&self, r: T) -> T {
        let g1 = T::one() + self.gamma;
        let r2 = r * r;
        let radical = T::lit(12.0) * r2 * g1 * g1
            + T::lit(27.0) * r2 * r2
            + T::lit(3.0) * self.gamma * self.gamma;
        T::lit(4.0) * self.nu
            + T::lit(2.0) * T::lit(5.0).sqrt() * r * self.alpha
            + radical.sqrt() * self.beta
            + self.lambda
    }
}

/// Closed-form constants of a dissipative parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConstants<T> {
    pub lambda_star: T,
    /// `lambda - lambda*`, strictly positive.
    pub gap: T,
    /// Radius of the absorbing ball, `1 + ||f|| / (lambda - lambda*)`.
    pub r_star: T,
    /// Largest admissible implicit Euler step.
    pub eps_star: T,
    pub bounds: Bounds<T>,
}

impl<T: Real> DerivedConstants<T> {
    pub fn m_of_r(&self, r: T) -> T {
        self.bounds.m(r)
    }

    pub fn l_of_r(&self, r: T) -> T {
        self.bounds.l(r)
    }
}

pub fn lambda_star<T: Real>(p: &Params<T>) -> T {
    p.lambda_star()
}

pub fn m_bound<T: Real>(p: &Params<T>, r: T) -> T {
    p.bounds().m(r)
}

pub fn l_bound<T: Real>(p: &Params<T>, r: T) -> T {
    p.bounds().l(r)
}

pub fn derived_constants<T: Real>(p: &Params<T>) -> Result<DerivedConstants<T>> {
    p.derived_constants()
}

/// Plain-`f64` mirror of [`Params`] for configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    pub nu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub lambda: f64,
    /// Index of the first forcing component.
    #[serde(default)]
    pub f_offset: i64,
    #[serde(default)]
    pub f: Vec<f64>,
    #[serde(default)]
    pub laplacian_sign: LaplacianSign,
}

impl ParamsSpec {
    pub fn build<T: Real>(&self) -> Result<Params<T>> {
        let f = LatticeWindow::new(self.f_offset, self.f.iter().map(|&v| T::lit(v)).collect())?;
        Ok(Params::new(
            T::lit(self.nu),
            T::lit(self.alpha),
            T::lit(self.beta),
            T::lit(self.gamma),
            T::lit(self.lambda),
            f,
        )?
        .with_laplacian_sign(self.laplacian_sign))
    }
}
