use crate::lattice::{window_field, window_jvp, Kernel, LatticeWindow, Params};
use crate::scalar::Real;

/// Transformed random field at noise value `z`, with `a = e^{sigma z}`:
/// `nu L U - alpha a U D-U - beta a^2 U^3 + beta (1 + gamma) a U^2 - beta gamma U - lambda U + f / a + sigma z U`.
///
/// The reaction terms are evaluated in the grouped form
/// `beta U (1 - a U)(a U - gamma)`, so `sigma = 0` reproduces
/// [`crate::lattice::vector_field`] exactly.
pub fn random_field<T: Real>(p: &Params<T>, sigma: T, z: T, u: &LatticeWindow<T>) -> LatticeWindow<T> {
    window_field(&Kernel::random(p, sigma, z), u, &p.f)
}

/// Directional derivative of [`random_field`] in `U` along `v`.
pub fn random_field_jvp<T: Real>(
    p: &Params<T>,
    sigma: T,
    z: T,
    u: &LatticeWindow<T>,
    v: &LatticeWindow<T>,
) -> LatticeWindow<T> {
    window_jvp(&Kernel::random(p, sigma, z), u, v)
}
