//! Smooth cut-off used to measure the mass a state carries far from the origin.

use super::window::LatticeWindow;
use crate::scalar::Real;

/// `sup |xi'|` for the cubic smoothstep ramp.
pub const CUTOFF_SLOPE_BOUND: f64 = 1.5;

/// Ramp `xi(s)`: 0 on `[0, 1]`, 1 on `[2, inf)`, `3w^2 - 2w^3` with `w = s - 1` between.
pub fn xi<T: Real>(s: T) -> T {
    if s <= T::one() {
        T::zero()
    } else if s >= T::lit(2.0) {
        T::one()
    } else {
        let w = s - T::one();
        T::lit(3.0) * w * w - T::lit(2.0) * w * w * w
    }
}

/// `xi_{k,i} = xi(|i| / k)`.
pub fn cutoff_xi<T: Real>(k: u64, i: i64) -> T {
    assert!(k >= 1, "cut-off scale must be positive");
    xi(T::count(i.unsigned_abs() as usize) / T::count(k as usize))
}

/// `sum_i xi_{k,i} u_i^2`.
pub fn tail_mass<T: Real>(u: &LatticeWindow<T>, k: u64) -> T {
    u.iter()
        .map(|(i, v)| cutoff_xi::<T>(k, i) * v * v)
        .sum()
}
