//! Bagging workflows: bootstrap generation of CART trees, ordered pruning
//! (MDSQ, BB) and integration (vote, OLA, KNORA-E), plus their
//! cross-validated evaluation.

mod config;
mod cv;
mod fit;
mod integrate;
mod prune;

pub use config::{
    enumerate_workflows, parse_workflow_id, CutPoint, CutSemantics, Integration, Pruning, WorkflowConfig,
    ENSEMBLE_SIZES,
};
pub use cv::{evaluate_grid, evaluate_workflow_cv, fold_seed, predict_fold, CvOutcome};
pub use fit::{
    fit_workflow, integrate, pruning_order, retained_models, FittedWorkflow, TreeBank, WorkflowSettings,
};
pub use integrate::{knora_e_select, nearest_neighbors, ola_select, plurality};
pub use prune::{bb_order, mdsq_order, prune_bb, prune_mdsq, PredictionTable, SignatureMatrix};
