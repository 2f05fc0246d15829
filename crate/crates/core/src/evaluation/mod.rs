//! Leave-one-dataset-out benchmark: meta-level MAP@k, base-level kappa of
//! autoBagging@n against the average-rank, bagging-100 and oracle baselines,
//! loss curves and Friedman/Nemenyi critical differences.

mod lodo;
mod metrics;
mod report;
mod stats;

pub use lodo::{lodo_fixed, 
    average_rank_baseline, fold_model, fold_training, lodo, oracle_and_bagging100, query_vectors, training_metadataset, LodoFold,
};
pub use metrics::{average_precision_at_k, best_at_n, kendall_tau, loss_curve, map_at_k, relevant_set};
pub use report::{benchmark, export_results, AuditCheck, BaseLevelRow, BenchmarkOptions, BenchmarkReport, METHODS};
pub use stats::{critical_difference, friedman_nemenyi, nemenyi_q, CdResult};
