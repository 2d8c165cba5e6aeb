//! State space, lattice operators, the Burgers-Huxley field and its
//! closed-form constants.

mod cutoff;
mod field;
mod operators;
mod params;
mod window;

pub use cutoff::{cutoff_xi, tail_mass, xi, CUTOFF_SLOPE_BOUND};
pub(crate) use field::{window_field, window_jvp, Kernel};
pub use field::{vector_field, vector_field_jvp};
pub use operators::{d_minus, d_plus, laplacian, laplacian_signed, LaplacianSign};
pub use params::{
    derived_constants, l_bound, lambda_star, lambda_star_of, m_bound, Bounds, DerivedConstants,
    Params, ParamsSpec,
};
pub use window::LatticeWindow;
