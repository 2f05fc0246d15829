//! The metadatabase: cross-validated kappa of every workflow on every
//! dataset, ranks and relevance labels, and the joined meta-dataset.

mod kappa;
mod metadataset;
mod performance;
mod ranks;

pub use kappa::cohen_kappa;
pub use metadataset::{
    assemble, metatargets, read_metatargets, write_metatargets, MetaDataset, MetaExample, MetaGroup, Metatarget,
};
pub use performance::{
    build_performance_table, dataset_folds, dataset_seed, evaluate_dataset, quarantine_path, BuildReport,
    PerformanceRecord, PerformanceTable,
};
pub use ranks::{ranks_to_relevance, tie_averaged_ranks};
