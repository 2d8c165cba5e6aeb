//! Point-cloud surrogates of attractors and the distances between them.

mod approx;
mod cloud;
mod hausdorff;
mod io;

pub use approx::{
    attractor_approx, attractor_from_cloud, default_burn_in, evolve_cloud, flow_stepper, implicit_meta,
    implicit_stepper, AttractorConfig, AttractorError, AttractorRun,
};
pub use cloud::{sample_ball, CloudMeta, PointCloud};
pub use hausdorff::{cloud_norm, hausdorff_semi, hausdorff_semi_pruned, hausdorff_sym, tail_profile};
pub use io::{cloud_from_json, cloud_to_json, CloudCodec, CloudDocument, CloudSpace, CLOUD_FORMAT_VERSION};
