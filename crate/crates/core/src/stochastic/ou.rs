use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Seed of realization `index` under `master`: splitmix64 finalizer of the
/// pair, so neighbouring indices give unrelated streams.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Exact one-step transition of `dz = -z dt + dW` over `h`:
/// `z(t + h) = decay * z(t) + sd * eta`, `eta ~ N(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuTransition {
    pub decay: f64,
    pub variance: f64,
}

impl OuTransition {
    pub fn new(h: f64) -> Self {
        Self {
            decay: (-h).exp(),
            variance: -(-2.0 * h).exp_m1() / 2.0,
        }
    }

    pub fn sd(&self) -> f64 {
        self.variance.sqrt()
    }

    /// Transition of `self` followed by `next`.
    pub fn then(&self, next: &Self) -> Self {
        Self {
            decay: self.decay * next.decay,
            variance: next.decay * next.decay * self.variance + next.variance,
        }
    }
}

/// Stationary variance of the unit Ornstein-Uhlenbeck process.
pub const OU_STATIONARY_VARIANCE: f64 = 0.5;

/// Stationary OU sample path on the grid `t_max - (n - 1 - j) h`, `j < n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OUPath {
    pub t_min: f64,
    pub t_max: f64,
    pub h: f64,
    pub seed: u64,
    pub z: Vec<f64>,
}

/// Grid length `round((t_max - t_min) / h) + 1`.
pub fn grid_len(t_min: f64, t_max: f64, h: f64) -> Result<usize> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidParameter(format!("path spacing h = {h}")));
    }
    if !(t_min < t_max) {
        return Err(Error::InvalidParameter(format!("path horizon [{t_min}, {t_max}]")));
    }
    Ok(((t_max - t_min) / h).round() as usize + 1)
}

/// Samples the stationary OU path exactly on the grid.
///
/// Generation runs backwards from `t_max`: the stationary process reversed
/// in time has the same law, so `z(t_max) ~ N(0, 1/2)` and
/// `z_{j} = e^{-h} z_{j+1} + sd eta_j`. Lowering `t_min` with the same seed
/// only prepends values.
pub fn ou_path(seed: u64, t_min: f64, t_max: f64, h: f64) -> Result<OUPath> {
    let n = grid_len(t_min, t_max, h)?;
    let step = OuTransition::new(h);
    let sd = step.sd();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = vec![0.0; n];
    let mut eta = || -> f64 { StandardNormal.sample(&mut rng) };
    z[n - 1] = OU_STATIONARY_VARIANCE.sqrt() * eta();
    for j in (0..n - 1).rev() {
        z[j] = step.decay * z[j + 1] + sd * eta();
    }
    Ok(OUPath {
        t_min: t_max - (n - 1) as f64 * h,
        t_max,
        h,
        seed,
        z,
    })
}

/// Brownian path `W(jh)`, `W(0) = 0`, from `n` independent increments.
pub fn wiener_path(seed: u64, n: usize, h: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sd = h.sqrt();
    let mut w = Vec::with_capacity(n + 1);
    w.push(0.0);
    for j in 0..n {
        let eta: f64 = StandardNormal.sample(&mut rng);
        w.push(w[j] + sd * eta);
    }
    w
}

impl OUPath {
    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        self.t_max - self.t_min
    }

    /// Time of grid node `j`.
    pub fn time(&self, j: usize) -> f64 {
        self.t_max - (self.len() - 1 - j) as f64 * self.h
    }

    /// Linear interpolation of the path; clamps outside the horizon.
    pub fn value_at(&self, t: f64) -> f64 {
        let n = self.len();
        let x = (t - self.t_min) / self.h;
        if !(x > 0.0) {
            return self.z[0];
        }
        let j = x.floor() as usize;
        if j >= n - 1 {
            return self.z[n - 1];
        }
        let w = x - j as f64;
        self.z[j] + w * (self.z[j + 1] - self.z[j])
    }

    /// Path with every value multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            z: self.z.iter().map(|v| c * v).collect(),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = grid_len(self.t_min, self.t_max, self.h)?;
        if n != self.len() {
            return Err(Error::InvalidParameter(format!(
                "path has {} values, grid needs {n}",
                self.len()
            )));
        }
        if self.z.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("OU path".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(&OUPathDocument {
            version: OU_FORMAT_VERSION,
            path: self.clone(),
        })
        .map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: OUPathDocument = serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))?;
        if doc.version != OU_FORMAT_VERSION {
            return Err(Error::Serialization(format!("unsupported path format version {}", doc.version)));
        }
        doc.path.validate()?;
        Ok(doc.path)
    }
}

pub const OU_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct OUPathDocument {
    version: u32,
    #[serde(flatten)]
    path: OUPath,
}

/// Trapezoidal time average `(1 / (t_max - t_min)) int z dt`.
pub fn ergodic_average(path: &OUPath) -> f64 {
    if path.len() < 2 {
        return path.z.first().copied().unwrap_or(0.0);
    }
    if path.horizon() < 100.0 {
        log::warn!("ergodic average over a short horizon {}", path.horizon());
    }
    let n = path.len();
    let inner: f64 = path.z[1..n - 1].iter().sum();
    let integral = path.h * (0.5 * (path.z[0] + path.z[n - 1]) + inner);
    integral / path.horizon()
}
