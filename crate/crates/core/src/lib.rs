//! Implicit-Euler discretization of the Burgers-Huxley lattice equation,
//! its Dirichlet truncations and random (Ornstein-Uhlenbeck driven)
//! counterpart, with point-cloud approximations of their attractors.
//!
//! All numerical code is generic over the scalar type through [`Real`];
//! the `*F64` aliases below name the double-precision instantiations used
//! by the experiment harness.

pub mod attractor;
pub mod error;
pub mod implicit;
pub mod lattice;
pub mod reference;
pub mod scalar;
pub mod state;
pub mod stochastic;
pub mod truncation;

pub use error::{Error, Result};
pub use lattice::{LatticeWindow, Params};
pub use scalar::Real;
pub use state::{LatticeState, Space, WindowPolicy};
pub use truncation::TruncatedState;

pub type LatticeWindowF64 = LatticeWindow<f64>;
pub type LatticeWindowF32 = LatticeWindow<f32>;
pub type ParamsF64 = Params<f64>;
pub type ParamsF32 = Params<f32>;
pub type TruncatedStateF64 = TruncatedState<f64>;
pub type TruncatedStateF32 = TruncatedState<f32>;
pub type StepConfigF64 = implicit::StepConfig<f64>;


pub type WindowCloudF64 = attractor::PointCloud<LatticeWindow<f64>>;
pub type TruncatedCloudF64 = attractor::PointCloud<TruncatedState<f64>>;
