//! Ranking of bagging workflows with metalearning.
//!
//! The crate covers the whole offline/online loop:
//!
//! * [`dataset`]: CSV ingestion, eligibility, stratified folds, bootstrap and encoding.
//! * [`learners`]: CART trees plus the naive Bayes / stump / majority landmarkers.
//! * [`workflows`]: the 63 bagging workflows (generation, MDSQ/BB pruning, vote/OLA/KNORA-E).
//! * [`metafeatures`]: the 158-entry characterization of a (dataset, workflow) pair.
//! * [`metadb`]: cross-validated kappa table, ranks, relevance labels and the meta-dataset.
//! * [`ranker`]: a pairwise gradient-boosted tree ranker with learned missing-value directions.
//! * [`evaluation`]: leave-one-dataset-out benchmark, MAP@k, loss curves, Friedman/Nemenyi.
//! * [`pipeline`]: the ingest/build/train/rank/benchmark commands used by the binary.

pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod learners;
pub mod metadb;
pub mod metafeatures;
pub mod pipeline;
pub mod ranker;
pub mod seed;
pub mod synth;
pub mod workflows;

pub use error::{Error, Result};
