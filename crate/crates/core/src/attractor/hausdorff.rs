//! Hausdorff semi-distance `d(A, B) = max_{a in A} min_{b in B} ||a - b||`,
//! its symmetrization and the set norm.

use num_traits::{Float, Zero};
use rayon::prelude::*;

use super::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::lattice::tail_mass;
use crate::state::LatticeState;

fn check_spaces<S: LatticeState>(a: &PointCloud<S>, b: &PointCloud<S>) -> Result<()> {
    let (Some(pa), Some(pb)) = (a.points().first(), b.points().first()) else {
        return Err(Error::InvalidParameter("Hausdorff distance of an empty cloud".into()));
    };
    if !pa.same_space(pb) {
        return Err(Error::SpaceMismatch(format!("{} vs {}", pa.space_label(), pb.space_label())));
    }
    Ok(())
}

fn nearest<S: LatticeState>(a: &S, b: &[S]) -> S::Scalar {
    b.iter()
        .map(|q| a.distance(q))
        .fold(S::Scalar::infinity(), |m, d| m.min(d))
}

/// Exact double loop; the outer loop runs in parallel.
pub fn hausdorff_semi<S: LatticeState>(a: &PointCloud<S>, b: &PointCloud<S>) -> Result<S::Scalar> {
    check_spaces(a, b)?;
    let bp = b.points();
    Ok(a.points()
        .par_iter()
        .map(|p| nearest(p, bp))
        .reduce(S::Scalar::zero, |x, y| x.max(y)))
}

/// Sequential semi-distance with early exit: the inner scan for `a` stops
/// as soon as some `b` is closer than the running maximum, since `a` can
/// then no longer raise it. Returns the same value as [`hausdorff_semi`].
pub fn hausdorff_semi_pruned<S: LatticeState>(a: &PointCloud<S>, b: &PointCloud<S>) -> Result<S::Scalar> {
    check_spaces(a, b)?;
    let mut cmax = S::Scalar::zero();
    for p in a.points() {
        let mut cmin = S::Scalar::infinity();
        for q in b.points() {
            let d = p.distance(q);
            if d < cmax {
                cmin = d;
                break;
            }
            cmin = cmin.min(d);
        }
        if cmin > cmax {
            cmax = cmin;
        }
    }
    Ok(cmax)
}

/// `rho(A, B) = max(d(A, B), d(B, A))`.
pub fn hausdorff_sym<S: LatticeState>(a: &PointCloud<S>, b: &PointCloud<S>) -> Result<S::Scalar> {
    Ok(hausdorff_semi(a, b)?.max(hausdorff_semi(b, a)?))
}

/// `||A|| = max_{a in A} ||a||`, the distance from `A` to `{0}`.
pub fn cloud_norm<S: LatticeState>(a: &PointCloud<S>) -> S::Scalar {
    a.points()
        .iter()
        .map(|p| p.norm())
        .fold(S::Scalar::zero(), |m, n| m.max(n))
}

/// Largest cut-off tail mass `sum_i xi_{k,i} u_i^2` over the cloud.
pub fn tail_profile<S: LatticeState>(a: &PointCloud<S>, k: u64) -> S::Scalar {
    a.points()
        .iter()
        .map(|p| tail_mass(&p.to_window(), k))
        .fold(S::Scalar::zero(), |m, t| m.max(t))
}
