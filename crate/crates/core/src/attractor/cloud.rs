use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::state::{LatticeState, Space};

/// Provenance attached to a cloud.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CloudMeta {
    /// Implicit Euler step, if the cloud came from the discrete system.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    /// Truncation half-width, for truncated clouds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Noise intensity, for pullback samples.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    pub seed: u64,
    pub steps_evolved: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pullback_t: Option<f64>,
    /// Hash of the experiment configuration that produced the cloud.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
}

/// Finite sample approximating an attractor.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud<S> {
    points: Vec<S>,
    pub meta: CloudMeta,
}

impl<S: LatticeState> PointCloud<S> {
    /// Checks that the cloud is nonempty, finite and lives in one space.
    pub fn new(points: Vec<S>, meta: CloudMeta) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::InvalidParameter("point cloud must be nonempty".into()))?;
        if let Some(bad) = points.iter().find(|p| !first.same_space(p)) {
            return Err(Error::SpaceMismatch(format!(
                "{} vs {}",
                first.space_label(),
                bad.space_label()
            )));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("point cloud".into()));
        }
        Ok(Self { points, meta })
    }

    pub(crate) fn from_raw(points: Vec<S>, meta: CloudMeta) -> Self {
        Self { points, meta }
    }

    /// Single-point cloud.
    pub fn singleton(point: S) -> Self {
        Self::from_raw(vec![point], CloudMeta::default())
    }

    pub fn points(&self) -> &[S] {
        &self.points
    }

    pub fn into_points(self) -> Vec<S> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Pointwise image under `g`, keeping the metadata.
    pub fn map<R: LatticeState>(&self, g: impl Fn(&S) -> R) -> PointCloud<R> {
        PointCloud::from_raw(self.points.iter().map(g).collect(), self.meta.clone())
    }

    /// Scales every point by `c`.
    pub fn scaled(&self, c: S::Scalar) -> Self {
        self.map(|p| p.scale(c))
    }

    /// Embeds every point into the windowed sequence space.
    pub fn to_window_cloud(&self) -> PointCloud<crate::lattice::LatticeWindow<S::Scalar>> {
        self.map(|p| p.to_window())
    }
}

/// Draws `count` points uniformly from the ball of the given radius in
/// `space`: a Gaussian direction scaled by `radius * U^{1/dim}`.
pub fn sample_ball<S: LatticeState>(radius: S::Scalar, space: Space, count: usize, seed: u64) -> Result<PointCloud<S>> {
    if !(radius > S::Scalar::zero()) {
        return Err(Error::InvalidParameter(format!("ball radius {radius} must be positive")));
    }
    if count == 0 {
        return Err(Error::InvalidParameter("sample count must be positive".into()));
    }
    let dim = space.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = radius.as_f64();
    let points = (0..count)
        .map(|_| {
            let mut dir: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
            let len = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
            let u: f64 = rng.random();
            let r = radius * u.powf(1.0 / dim as f64);
            // keep every point inside the closed ball after rounding
            let scale = r / len * (1.0 - 4.0 * f64::EPSILON);
            for v in &mut dir {
                *v *= scale;
            }
            S::from_coords(space, dir.into_iter().map(S::Scalar::lit).collect())
        })
        .collect();
    Ok(PointCloud::from_raw(
        points,
        CloudMeta {
            seed,
            m: match space {
                Space::Truncated { m } => Some(m),
                Space::Window { .. } => None,
            },
            ..CloudMeta::default()
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeWindow;
    use crate::truncation::TruncatedState;

    #[test]
    fn ball_samples_stay_inside() {
        let cloud: PointCloud<LatticeWindow<f64>> =
            sample_ball(2.5, Space::Window { half_width: 3 }, 500, 11).unwrap();
        assert_eq!(cloud.len(), 500);
        assert!(cloud.points().iter().all(|p| p.norm() <= 2.5));
        assert!(cloud.points().iter().all(|p| p.offset() == -3 && p.len() == 7));
    }

    #[test]
    fn sampling_is_deterministic() {
        let space = Space::Truncated { m: 2 };
        let a: PointCloud<TruncatedState<f64>> = sample_ball(1.0, space, 32, 5).unwrap();
        let b: PointCloud<TruncatedState<f64>> = sample_ball(1.0, space, 32, 5).unwrap();
        let c: PointCloud<TruncatedState<f64>> = sample_ball(1.0, space, 32, 6).unwrap();
        for (p, q) in a.points().iter().zip(b.points()) {
            let pb: Vec<u64> = p.values().iter().map(|v| v.to_bits()).collect();
            let qb: Vec<u64> = q.values().iter().map(|v| v.to_bits()).collect();
            assert_eq!(pb, qb);
        }
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_empty_and_mixed_clouds() {
        assert!(PointCloud::<TruncatedState<f64>>::new(vec![], CloudMeta::default()).is_err());
        let mixed = vec![TruncatedState::<f64>::zeros(1), TruncatedState::zeros(2)];
        assert!(matches!(
            PointCloud::new(mixed, CloudMeta::default()),
            Err(Error::SpaceMismatch(_))
        ));
        assert!(sample_ball::<TruncatedState<f64>>(0.0, Space::Truncated { m: 1 }, 3, 0).is_err());
    }
}
