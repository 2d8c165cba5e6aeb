//! Dense reference implementations written directly from the printed
//! formulas, independent of the library's windowed kernels.

#![allow(dead_code)]

use bhl_core::LatticeWindow;
use proptest::prelude::*;

pub const NU: f64 = 1.0;
pub const ALPHA: f64 = 1.0;
pub const BETA: f64 = 1.0;
pub const GAMMA: f64 = 0.5;

/// Dense vector on sites `lo..lo + v.len()`, zero elsewhere.
#[derive(Debug, Clone)]
pub struct Dense {
    pub lo: i64,
    pub v: Vec<f64>,
}

impl Dense {
    pub fn at(&self, i: i64) -> f64 {
        let k = i - self.lo;
        if k < 0 || k >= self.v.len() as i64 {
            0.0
        } else {
            self.v[k as usize]
        }
    }

    pub fn from_window(u: &LatticeWindow<f64>, lo: i64, hi: i64) -> Self {
        Self {
            lo,
            v: (lo..=hi).map(|i| u.get(i)).collect(),
        }
    }

    pub fn to_window(&self) -> LatticeWindow<f64> {
        LatticeWindow::new(self.lo, self.v.clone()).unwrap()
    }
}

pub struct Coeffs {
    pub nu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub lambda: f64,
}

pub const DEFAULT: Coeffs = Coeffs {
    nu: NU,
    alpha: ALPHA,
    beta: BETA,
    gamma: GAMMA,
    lambda: 8.0,
};

/// `F_i = nu(-u_{i-1} + 2u_i - u_{i+1}) - alpha u_i (u_{i-1} - u_i)
///  + beta u_i (1 - u_i)(u_i - gamma) - lambda u_i + f_i` on `[lo, hi]`.
pub fn field(c: &Coeffs, u: &Dense, f: &Dense, lo: i64, hi: i64) -> Vec<f64> {
    (lo..=hi)
        .map(|i| {
            let (l, m, r) = (u.at(i - 1), u.at(i), u.at(i + 1));
            c.nu * (-l + 2.0 * m - r) - c.alpha * m * (l - m) + c.beta * m * (1.0 - m) * (m - c.gamma) - c.lambda * m
                + f.at(i)
        })
        .collect()
}

pub fn lambda_star(c: &Coeffs) -> f64 {
    4.0 * c.nu + (2.0 * c.alpha + c.beta + c.beta * c.gamma).powi(2) / (4.0 * c.beta) - c.beta * c.gamma
}

pub fn m_r(c: &Coeffs, r: f64, f_norm: f64) -> f64 {
    c.beta * r.powi(3)
        + (2.0 * c.alpha + c.beta + c.beta * c.gamma) * r * r
        + (4.0 * c.nu + c.beta * c.gamma + c.lambda) * r
        + f_norm
}

pub fn l_r(c: &Coeffs, r: f64) -> f64 {
    4.0 * c.nu
        + 2.0 * 5f64.sqrt() * r * c.alpha
        + (12.0 * r * r * (1.0 + c.gamma).powi(2) + 27.0 * r.powi(4) + 3.0 * c.gamma * c.gamma).sqrt() * c.beta
        + c.lambda
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Gaussian elimination with partial pivoting.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let m = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= m * a[k][j];
            }
            b[i] -= m * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    x
}

/// Finitely supported states with `||u|| <= r`, on windows of up to 12 sites.
pub fn state_in_ball(r: f64) -> impl Strategy<Value = LatticeWindow<f64>> {
    (-6i64..6, prop::collection::vec(-1.0f64..1.0, 1..12), 0.0f64..=1.0).prop_map(move |(lo, v, s)| {
        let n = norm(&v);
        let c = if n > 0.0 { r * s / n } else { 0.0 };
        LatticeWindow::new(lo, v.iter().map(|x| c * x).collect()).unwrap()
    })
}

pub fn any_state() -> impl Strategy<Value = LatticeWindow<f64>> {
    (-6i64..6, prop::collection::vec(-3.0f64..3.0, 0..12)).prop_map(|(lo, v)| LatticeWindow::new(lo, v).unwrap())
}
