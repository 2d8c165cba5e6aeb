//! Ornstein-Uhlenbeck noise, the transformed random lattice field and
//! pullback sampling of the random attractor.
//!
//! The multiplicative noise intensity is called `sigma` throughout, so it
//! never clashes with the implicit Euler step `eps`.

mod field;
mod ou;
mod pullback;
mod radius;

pub use field::{random_field, random_field_jvp};
pub use ou::{
    derive_seed, ergodic_average, grid_len, ou_path, wiener_path, OUPath, OuTransition, OU_FORMAT_VERSION,
    OU_STATIONARY_VARIANCE,
};
pub use pullback::{pullback_along, pullback_point, pullback_sample, NoiseConfig, PullbackMethod};
pub use radius::{absorbing_radius, RadiusEstimate};
