//! Dataset and workflow characterization: 146 systematically generated
//! metafeatures, 8 simple measures and landmarker accuracies, and 4
//! workflow descriptors.

mod functions;
mod landmarkers;
mod mic;
mod r_value;
mod registry;
mod vector;

pub use functions::{entropy, eta_squared, histogram, mutual_information, pearson, postprocess, skewness, PostProcessor};
pub use landmarkers::{compute_landmarkers, Landmarker, LandmarkerResults};
pub use mic::{mic, mic_with, MicParams};
pub use r_value::r_values;
pub use registry::{
    build_registry, Block, InputObject, MetaFunction, MetafeatureSpec, Registry, RegistryConfig, REGISTRY_VERSION,
};
pub use vector::{
    compute_vector, compute_vector_for, profile_dataset, rank_feature, read_vectors, write_vectors, DatasetProfile,
    MetafeatureVector, RankTable, LANDMARKER_FOLDS,
};
