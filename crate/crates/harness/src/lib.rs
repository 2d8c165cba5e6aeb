//! Experiment orchestration for the Burgers-Huxley lattice: convergence
//! studies, bound sweeps, error-order fits, the verification suite and the
//! artifacts they write.

pub mod config;
pub mod error;
pub mod experiments;
pub mod table;
pub mod verify;

pub use config::ExperimentConfig;
pub use error::{ExitStatus, HarnessError, Result};
pub use table::{Format, ResultTable};
