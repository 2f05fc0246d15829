//! Cross-validated kappa of workflows. All configurations evaluated on a
//! fold share one tree bank, one pool prediction table and one set of
//! neighbor lists; only pruning and integration differ between them.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::config::{Pruning, WorkflowConfig};
use super::fit::{integrate, pruning_order, retained_models, TreeBank, WorkflowSettings};
use super::integrate::nearest_neighbors;
use crate::dataset::{Dataset, Encoder, FoldAssignment};
use crate::metadb::cohen_kappa;
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvOutcome {
    pub config: WorkflowConfig,
    /// `None` for skipped (degenerate) folds.
    pub fold_kappas: Vec<Option<f64>>,
    /// Mean over non-skipped folds; 0 when every fold was skipped.
    pub mean_kappa: f64,
    /// Set when at least one fold was skipped.
    pub flagged: bool,
}

/// Seed of the tree bank used on fold `fold` (1-based).
pub fn fold_seed(seed: u64, fold: usize) -> u64 {
    seed::derive(seed, fold as u64)
}

/// Held-out predictions of every configuration on one fold, or `None` when
/// the training part holds a single class.
pub fn predict_fold(
    d: &Dataset,
    train_rows: &[usize],
    test_rows: &[usize],
    configs: &[WorkflowConfig],
    seed: u64,
    settings: &WorkflowSettings,
) -> Option<Vec<Vec<usize>>> {
    let classes_present = d.class_counts(train_rows).iter().filter(|&&c| c > 0).count();
    if classes_present < 2 || test_rows.is_empty() {
        return None;
    }
    let max_models = configs.iter().map(|c| c.n_models).max()?;
    let bank = TreeBank::fit(d, train_rows, max_models, seed, settings.tree);
    let pool_labels: Vec<usize> = train_rows.iter().map(|&r| d.target[r]).collect();
    let pool_table = bank.predict(d, train_rows, max_models);
    let test_table = bank.predict(d, test_rows, max_models);

    let encoder = Encoder::fit(d, train_rows);
    let pool_view = encoder.transform(d, train_rows);
    let test_view = encoder.transform(d, test_rows);
    let neighbors: Vec<Vec<usize>> = (0..test_rows.len())
        .map(|i| nearest_neighbors(&pool_view.data, pool_view.n_cols, test_view.row(i), settings.k_neighbors))
        .collect();

    let mut orders: HashMap<(usize, Pruning), Vec<usize>> = HashMap::new();
    let n_classes = d.n_classes();
    let out = configs
        .iter()
        .map(|c| {
            let order = orders
                .entry((c.n_models, c.pruning))
                .or_insert_with(|| pruning_order(c.pruning, &pool_labels, &pool_table, c.n_models, settings));
            let members = retained_models(c, order, settings);
            let member_pool = pool_table.select_models(&members);
            (0..test_rows.len())
                .map(|i| {
                    let preds: Vec<usize> = members.iter().map(|&m| test_table.get(i, m)).collect();
                    integrate(c.integration, &preds, &neighbors[i], &pool_labels, &member_pool, n_classes)
                })
                .collect()
        })
        .collect();
    Some(out)
}

/// k-fold kappa of every configuration in `configs`.
pub fn evaluate_grid(
    d: &Dataset,
    folds: &FoldAssignment,
    configs: &[WorkflowConfig],
    seed: u64,
    settings: &WorkflowSettings,
) -> Vec<CvOutcome> {
    let mut per_config: Vec<Vec<Option<f64>>> = vec![Vec::with_capacity(folds.k); configs.len()];
    for fold in folds.folds() {
        let train = folds.train_rows(fold);
        let test = folds.test_rows(fold);
        let truth: Vec<usize> = test.iter().map(|&r| d.target[r]).collect();
        match predict_fold(d, &train, &test, configs, fold_seed(seed, fold), settings) {
            Some(preds) => {
                for (slot, p) in per_config.iter_mut().zip(preds) {
                    slot.push(Some(cohen_kappa(&truth, &p)));
                }
            }
            None => per_config.iter_mut().for_each(|slot| slot.push(None)),
        }
    }
    configs
        .iter()
        .zip(per_config)
        .map(|(c, fold_kappas)| {
            let done: Vec<f64> = fold_kappas.iter().flatten().copied().collect();
            let mean_kappa = if done.is_empty() {
                0.0
            } else {
                done.iter().sum::<f64>() / done.len() as f64
            };
            CvOutcome {
                config: *c,
                flagged: done.len() < fold_kappas.len(),
                fold_kappas,
                mean_kappa,
            }
        })
        .collect()
}

pub fn evaluate_workflow_cv(
    config: &WorkflowConfig,
    d: &Dataset,
    folds: &FoldAssignment,
    seed: u64,
    settings: &WorkflowSettings,
) -> CvOutcome {
    evaluate_grid(d, folds, std::slice::from_ref(config), seed, settings)
        .pop()
        .expect("one outcome per config")
}
