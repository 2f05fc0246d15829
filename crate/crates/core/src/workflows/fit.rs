use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{CutSemantics, Integration, Pruning, WorkflowConfig};
use super::integrate::{knora_e_select, nearest_neighbors, ola_select, plurality};
use super::prune::{bb_order, mdsq_order, PredictionTable, SignatureMatrix};
use crate::dataset::{bootstrap_indices, Dataset, Encoder};
use crate::error::{Error, Result};
use crate::learners::{fit_tree, DecisionTree, TreeParams};
use crate::seed;

/// Knobs the workflow grid leaves open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkflowSettings {
    /// Neighborhood size for OLA and KNORA-E.
    pub k_neighbors: usize,
    /// Reference coordinate of the MDSQ target point.
    pub mdsq_reference: f64,
    pub cut_semantics: CutSemantics,
    pub tree: TreeParams,
}

impl Default for WorkflowSettings {
    fn default() -> Self {
        WorkflowSettings {
            k_neighbors: 7,
            mdsq_reference: 0.075,
            cut_semantics: CutSemantics::FractionPruned,
            tree: TreeParams::BAGGING,
        }
    }
}

/// Bootstrap trees fitted on one training partition. Tree `i` always uses
/// the bootstrap seeded by `derive(seed, i)`, so the first 50 trees of a
/// 200-tree bank are exactly a 50-tree ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeBank {
    pub trees: Vec<DecisionTree>,
}

impl TreeBank {
    pub fn fit(d: &Dataset, train_rows: &[usize], n_trees: usize, seed: u64, params: TreeParams) -> Self {
        let trees = (0..n_trees)
            .into_par_iter()
            .map(|i| {
                let sample: Vec<usize> = bootstrap_indices(train_rows.len(), seed::derive(seed, i as u64))
                    .into_iter()
                    .map(|j| train_rows[j])
                    .collect();
                fit_tree(d, &sample, params)
            })
            .collect();
        TreeBank { trees }
    }

    /// Predictions of the first `n_models` trees on `rows`.
    pub fn predict(&self, d: &Dataset, rows: &[usize], n_models: usize) -> PredictionTable {
        let mut t = PredictionTable::new(rows.len(), n_models);
        for (m, tree) in self.trees[..n_models].iter().enumerate() {
            for (i, &r) in rows.iter().enumerate() {
                t.set(i, m, tree.predict(d, r));
            }
        }
        t
    }
}

/// Full pruning order of the first `n_models` pool columns.
pub fn pruning_order(
    pruning: Pruning,
    pool_labels: &[usize],
    pool_table: &PredictionTable,
    n_models: usize,
    settings: &WorkflowSettings,
) -> Vec<usize> {
    match pruning {
        Pruning::None => (0..n_models).collect(),
        Pruning::Mdsq => {
            let sig = SignatureMatrix::from_predictions(pool_table, pool_labels, n_models);
            mdsq_order(&sig, settings.mdsq_reference)
        }
        Pruning::Bb => bb_order(pool_labels, pool_table, n_models),
    }
}

/// Ensemble members (bank indices) of a configuration, given its pruning order.
pub fn retained_models(config: &WorkflowConfig, order: &[usize], settings: &WorkflowSettings) -> Vec<usize> {
    order[..config.retained(settings.cut_semantics)].to_vec()
}

/// Integration of member predictions for one query.
///
/// `member_preds[j]` is member `j`'s prediction for the query, `neighbors`
/// are pool rows nearest first, `table` holds member predictions on the pool.
pub fn integrate(
    integration: Integration,
    member_preds: &[usize],
    neighbors: &[usize],
    pool_labels: &[usize],
    table: &PredictionTable,
    n_classes: usize,
) -> usize {
    match integration {
        Integration::Vote => plurality(member_preds.iter().copied(), n_classes),
        Integration::Ola => member_preds[ola_select(neighbors, pool_labels, table)],
        Integration::KnoraE => {
            let chosen = knora_e_select(neighbors, pool_labels, table);
            plurality(chosen.iter().map(|&m| member_preds[m]), n_classes)
        }
    }
}

/// A bagging workflow fitted on a training partition, carrying its
/// selection pool for dynamic integration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedWorkflow {
    pub config: WorkflowConfig,
    pub k_neighbors: usize,
    pub class_labels: Vec<String>,
    /// Members after pruning, in pruning order.
    pub models: Vec<DecisionTree>,
    /// Bank index of each member.
    pub member_ids: Vec<usize>,
    pub encoder: Encoder,
    pub pool_width: usize,
    /// Encoded pool instances, row-major.
    pub pool_points: Vec<f64>,
    pub pool_labels: Vec<usize>,
    /// `|pool| x |models|` member predictions on the pool.
    pub pool_predictions: PredictionTable,
}

/// Fits `config` on `train_rows`: bootstrap trees, pool predictions, pruning.
pub fn fit_workflow(
    config: &WorkflowConfig,
    d: &Dataset,
    train_rows: &[usize],
    seed: u64,
    settings: &WorkflowSettings,
) -> FittedWorkflow {
    let bank = TreeBank::fit(d, train_rows, config.n_models, seed, settings.tree);
    let pool_labels: Vec<usize> = train_rows.iter().map(|&r| d.target[r]).collect();
    let full = bank.predict(d, train_rows, config.n_models);
    let order = pruning_order(config.pruning, &pool_labels, &full, config.n_models, settings);
    let member_ids = retained_models(config, &order, settings);
    let encoder = Encoder::fit(d, train_rows);
    let view = encoder.transform(d, train_rows);
    FittedWorkflow {
        config: *config,
        k_neighbors: settings.k_neighbors,
        class_labels: d.class_labels.clone(),
        models: member_ids.iter().map(|&m| bank.trees[m].clone()).collect(),
        pool_predictions: full.select_models(&member_ids),
        member_ids,
        encoder,
        pool_width: view.n_cols,
        pool_points: view.data,
        pool_labels,
    }
}

impl FittedWorkflow {
    fn member_predictions(&self, d: &Dataset, row: usize) -> Vec<usize> {
        self.models.iter().map(|t| t.predict(d, row)).collect()
    }

    fn neighbors(&self, d: &Dataset, row: usize, k: usize) -> Vec<usize> {
        let mut q = Vec::with_capacity(self.pool_width);
        self.encoder.encode_row(d, row, &mut q);
        nearest_neighbors(&self.pool_points, self.pool_width, &q, k)
    }

    pub fn predict_vote(&self, d: &Dataset, row: usize) -> usize {
        plurality(self.member_predictions(d, row), self.class_labels.len())
    }

    pub fn predict_ola(&self, d: &Dataset, row: usize, k: usize) -> usize {
        let nn = self.neighbors(d, row, k);
        let m = ola_select(&nn, &self.pool_labels, &self.pool_predictions);
        self.models[m].predict(d, row)
    }

    pub fn predict_knorae(&self, d: &Dataset, row: usize, k: usize) -> usize {
        let nn = self.neighbors(d, row, k);
        let chosen = knora_e_select(&nn, &self.pool_labels, &self.pool_predictions);
        plurality(
            chosen.iter().map(|&m| self.models[m].predict(d, row)),
            self.class_labels.len(),
        )
    }

    /// Prediction with the configured integration and neighborhood size.
    pub fn predict(&self, d: &Dataset, row: usize) -> usize {
        match self.config.integration {
            Integration::Vote => self.predict_vote(d, row),
            Integration::Ola => self.predict_ola(d, row, self.k_neighbors),
            Integration::KnoraE => self.predict_knorae(d, row, self.k_neighbors),
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string(self)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        // fully grown trees can nest deeper than the default limit
        let mut de = serde_json::Deserializer::from_str(&text);
        de.disable_recursion_limit();
        Ok(FittedWorkflow::deserialize(&mut de)?)
    }
}
