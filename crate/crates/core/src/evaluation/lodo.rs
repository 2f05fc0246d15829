//! Leave-one-dataset-out evaluation of the ranker.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metadb::{assemble, MetaDataset, PerformanceTable};
use crate::metafeatures::{compute_vector, DatasetProfile, MetafeatureVector, RankTable, Registry};
use crate::ranker::{GBRanker, RankerConfig};
use crate::workflows::{parse_workflow_id, WorkflowConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LodoFold {
    pub dataset_id: String,
    pub training_ids: Vec<String>,
    /// Workflow ids by descending ranker score.
    pub predicted: Vec<String>,
    pub scores: Vec<f64>,
    /// The average-rank baseline of this fold's training datasets.
    pub average_rank: Vec<String>,
    /// Mean kappa of every workflow on the held-out dataset.
    pub kappas: BTreeMap<String, f64>,
    /// Tie-averaged ground-truth ranks on the held-out dataset.
    pub truth_ranks: BTreeMap<String, f64>,
    /// The key audit found no held-out record in the training table.
    pub leakage_free: bool,
}

/// Workflows ordered by ascending mean rank across the table's datasets,
/// ties by id.
pub fn average_rank_baseline(training: &PerformanceTable) -> Vec<String> {
    let ranks = RankTable::from_performance(training);
    let mut means: Vec<(String, f64)> = ranks
        .ranks
        .iter()
        .map(|(w, r)| (w.clone(), r.iter().sum::<f64>() / r.len() as f64))
        .collect();
    means.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    means.into_iter().map(|(w, _)| w).collect()
}

/// `(oracle kappa, kappa of 100nonenone)` on one dataset.
pub fn oracle_and_bagging100(table: &PerformanceTable, dataset_id: &str) -> Result<(f64, f64)> {
    let recs = table.dataset(dataset_id);
    if recs.is_empty() {
        return Err(Error::InvalidArgument(format!("dataset {dataset_id} not in table")));
    }
    let oracle = recs.iter().map(|r| r.mean_kappa).fold(f64::NEG_INFINITY, f64::max);
    let base_id = WorkflowConfig::bagging100().id();
    let base = table
        .get(dataset_id, &base_id)
        .ok_or_else(|| Error::MissingJoin {
            dataset: dataset_id.to_string(),
            workflow: base_id,
        })?
        .mean_kappa;
    Ok((oracle, base))
}

fn configs_of(table: &PerformanceTable, dataset_id: &str) -> Result<Vec<WorkflowConfig>> {
    table
        .dataset(dataset_id)
        .iter()
        .map(|r| parse_workflow_id(&r.workflow_id))
        .collect()
}

/// Vectors of every workflow for one dataset under a rank table.
pub fn query_vectors(
    profile: &DatasetProfile,
    configs: &[WorkflowConfig],
    ranks: &RankTable,
    registry: &Registry,
) -> Result<Vec<MetafeatureVector>> {
    configs.iter().map(|c| compute_vector(profile, c, ranks, registry)).collect()
}

/// Meta-dataset over every dataset of `table`. Each dataset's rank features
/// come from the other datasets of the table, the same view a query dataset
/// gets, so a dataset's own ranks never leak into its features.
pub fn training_metadataset(
    profiles: &[DatasetProfile],
    table: &PerformanceTable,
    registry: &Registry,
) -> Result<MetaDataset> {
    let ids = table.dataset_ids();
    let by_id: HashMap<&str, &DatasetProfile> = profiles.iter().map(|p| (p.dataset_id.as_str(), p)).collect();
    let mut vectors = Vec::with_capacity(table.len());
    for id in &ids {
        let profile = by_id
            .get(id.as_str())
            .ok_or_else(|| Error::InvalidArgument(format!("no metafeature profile for dataset {id}")))?;
        let others: Vec<String> = ids.iter().filter(|o| *o != id).cloned().collect();
        let ranks = RankTable::from_performance(&table.subset(&others));
        vectors.extend(query_vectors(profile, &configs_of(table, id)?, &ranks, registry)?);
    }
    assemble(table, &registry.names(), &vectors)
}

/// Meta-training set and query rank table for the fold that holds out
/// `held_out`. Rank features come from the training datasets only.
pub fn fold_training(
    profiles: &[DatasetProfile],
    performance: &PerformanceTable,
    registry: &Registry,
    held_out: &str,
) -> Result<(MetaDataset, RankTable, PerformanceTable)> {
    let training_ids: Vec<String> = performance.dataset_ids().into_iter().filter(|d| d != held_out).collect();
    let training = performance.subset(&training_ids);
    let meta = training_metadataset(profiles, &training, registry)?;
    Ok((meta, RankTable::from_performance(&training), training))
}

/// The ranker trained for the fold holding out `held_out`.
pub fn fold_model(
    profiles: &[DatasetProfile],
    performance: &PerformanceTable,
    registry: &Registry,
    held_out: &str,
    config: RankerConfig,
) -> Result<(GBRanker, RankTable)> {
    let (meta, ranks, _) = fold_training(profiles, performance, registry, held_out)?;
    Ok((GBRanker::train(&meta, config)?, ranks))
}

fn run_fold(
    profiles: &[DatasetProfile],
    performance: &PerformanceTable,
    registry: &Registry,
    held_out: &str,
    config: RankerConfig,
) -> Result<LodoFold> {
    let (meta, ranks, training) = fold_training(profiles, performance, registry, held_out)?;
    let leakage_free = training.dataset(held_out).is_empty() && meta.group(held_out).is_none();
    let model = GBRanker::train(&meta, config)?;
    let profile = profiles
        .iter()
        .find(|p| p.dataset_id == held_out)
        .ok_or_else(|| Error::InvalidArgument(format!("no metafeature profile for dataset {held_out}")))?;
    let vectors = query_vectors(profile, &configs_of(performance, held_out)?, &ranks, registry)?;
    let ranked = model.rank_workflows(&model.feature_hash, &vectors)?;
    Ok(LodoFold {
        dataset_id: held_out.to_string(),
        training_ids: training.dataset_ids(),
        predicted: ranked.iter().map(|(w, _)| w.clone()).collect(),
        scores: ranked.iter().map(|(_, s)| *s).collect(),
        average_rank: average_rank_baseline(&training),
        kappas: performance
            .dataset(held_out)
            .iter()
            .map(|r| (r.workflow_id.clone(), r.mean_kappa))
            .collect(),
        truth_ranks: performance.ranks(held_out),
        leakage_free,
    })
}

/// One fold per dataset, sorted by dataset id.
pub fn lodo(
    profiles: &[DatasetProfile],
    performance: &PerformanceTable,
    registry: &Registry,
    config: RankerConfig,
) -> Result<Vec<LodoFold>> {
    let ids = performance.dataset_ids();
    if ids.len() < 3 {
        return Err(Error::InvalidArgument("leave-one-dataset-out needs at least 3 datasets".into()));
    }
    ids.par_iter()
        .map(|id| run_fold(profiles, performance, registry, id, config))
        .collect()
}

/// Leave-one-dataset-out over a fixed meta-dataset whose features do not
/// depend on the training datasets (no rank features to recompute).
pub fn lodo_fixed(meta: &MetaDataset, performance: &PerformanceTable, config: RankerConfig) -> Result<Vec<LodoFold>> {
    let ids = meta.dataset_ids();
    if ids.len() < 3 {
        return Err(Error::InvalidArgument("leave-one-dataset-out needs at least 3 datasets".into()));
    }
    ids.par_iter()
        .map(|held_out| {
            let train = meta.without(held_out);
            let training = performance.subset(&train.dataset_ids());
            let model = GBRanker::train(&train, config)?;
            let vectors: Vec<MetafeatureVector> = meta
                .vectors()
                .into_iter()
                .filter(|v| &v.dataset_id == held_out)
                .collect();
            let ranked = model.rank_workflows(&model.feature_hash, &vectors)?;
            Ok(LodoFold {
                dataset_id: held_out.clone(),
                training_ids: training.dataset_ids(),
                predicted: ranked.iter().map(|(w, _)| w.clone()).collect(),
                scores: ranked.iter().map(|(_, s)| *s).collect(),
                average_rank: average_rank_baseline(&training),
                kappas: performance
                    .dataset(held_out)
                    .iter()
                    .map(|r| (r.workflow_id.clone(), r.mean_kappa))
                    .collect(),
                truth_ranks: performance.ranks(held_out),
                leakage_free: training.dataset(held_out).is_empty() && train.group(held_out).is_none(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metadb::PerformanceRecord;

    fn table(rows: &[(&str, &str, f64)]) -> PerformanceTable {
        PerformanceTable::new(
            rows.iter()
                .map(|&(d, w, k)| PerformanceRecord {
                    dataset_id: d.into(),
                    workflow_id: w.into(),
                    fold_kappas: vec![Some(k)],
                    mean_kappa: k,
                    flagged: false,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn average_rank_examples() {
        let one = table(&[("a", "x", 0.1), ("a", "y", 0.9), ("a", "z", 0.5)]);
        assert_eq!(average_rank_baseline(&one), vec!["y", "z", "x"]);
        let reversed = table(&[("a", "x", 0.1), ("a", "y", 0.9), ("b", "x", 0.9), ("b", "y", 0.1)]);
        assert_eq!(average_rank_baseline(&reversed), vec!["x", "y"]);
    }

    #[test]
    fn oracle_examples() {
        let t = table(&[("a", "100nonenone", 0.4), ("a", "50bb0.5ola", 0.7), ("a", "200nonenone", 0.2)]);
        assert_eq!(oracle_and_bagging100(&t, "a").unwrap(), (0.7, 0.4));
        assert!(oracle_and_bagging100(&t, "b").is_err());
        let t = table(&[("a", "50bb0.5ola", 0.7)]);
        assert!(oracle_and_bagging100(&t, "a").is_err());
    }
}
