use std::collections::HashSet;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::objective::{accumulate_pairwise, pairwise_loss};
use super::tree::{fit_tree_to_gradients, FeatureMatrix, RegTree, TreeGrowth};
use crate::error::{Error, Result};
use crate::metadb::MetaDataset;
use crate::metafeatures::MetafeatureVector;
use crate::seed;

pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RankerConfig {
    pub rounds: usize,
    pub max_depth: usize,
    pub eta: f64,
    pub lambda: f64,
    pub min_child_weight: f64,
    /// Fraction of rows each tree is fitted on.
    pub subsample: f64,
    pub base_score: f64,
    pub seed: u64,
}

impl Default for RankerConfig {
    fn default() -> Self {
        RankerConfig {
            rounds: 200,
            max_depth: 4,
            eta: 0.1,
            lambda: 1.0,
            min_child_weight: 1.0,
            subsample: 1.0,
            base_score: 0.0,
            seed: 0,
        }
    }
}

/// Hash identifying an ordered list of feature names.
pub fn feature_hash(names: &[String]) -> String {
    let mut hasher = Sha256::new();
    for n in names {
        hasher.update(n.as_bytes());
        hasher.update([0u8]);
    }
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GBRanker {
    pub version: u32,
    pub config: RankerConfig,
    pub feature_names: Vec<String>,
    pub feature_hash: String,
    pub trees: Vec<RegTree>,
}

/// Training loss after each round (index 0 is before the first tree).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub losses: Vec<f64>,
}

struct Flat {
    columns: Vec<Vec<Option<f64>>>,
    labels: Vec<f64>,
    groups: Vec<(usize, usize)>,
}

fn flatten(data: &MetaDataset) -> Result<Flat> {
    let width = data.feature_names.len();
    let mut columns = vec![Vec::new(); width];
    let mut labels = Vec::new();
    let mut groups = Vec::new();
    for g in &data.groups {
        if g.examples.is_empty() {
            return Err(Error::InvalidArgument(format!("group {} is empty", g.dataset_id)));
        }
        let start = labels.len();
        for e in &g.examples {
            if e.x.len() != width {
                return Err(Error::InvalidArgument(format!("example width {} != {width}", e.x.len())));
            }
            for (c, v) in columns.iter_mut().zip(&e.x) {
                c.push(*v);
            }
            labels.push(f64::from(e.relevance));
        }
        groups.push((start, labels.len()));
    }
    Ok(Flat { columns, labels, groups })
}

fn total_loss(scores: &[f64], flat: &Flat) -> f64 {
    flat.groups
        .iter()
        .map(|&(a, b)| pairwise_loss(&scores[a..b], &flat.labels[a..b]))
        .sum()
}

impl GBRanker {
    pub fn train(data: &MetaDataset, config: RankerConfig) -> Result<GBRanker> {
        Ok(Self::train_with_report(data, config)?.0)
    }

    /// Boosting: each round fits one tree to the group-wise pairwise
    /// gradients at the current scores.
    pub fn train_with_report(data: &MetaDataset, config: RankerConfig) -> Result<(GBRanker, TrainReport)> {
        if data.groups.len() < 2 {
            return Err(Error::InvalidArgument("ranker training needs at least two groups".into()));
        }
        if !(config.subsample > 0.0 && config.subsample <= 1.0) {
            return Err(Error::InvalidArgument("subsample must be in (0, 1]".into()));
        }
        let flat = flatten(data)?;
        let x = FeatureMatrix::new(&flat.columns);
        let n = flat.labels.len();
        let growth = TreeGrowth {
            max_depth: config.max_depth,
            min_child_weight: config.min_child_weight,
            lambda: config.lambda,
        };
        let mut scores = vec![config.base_score; n];
        let mut losses = vec![total_loss(&scores, &flat)];
        let mut trees = Vec::with_capacity(config.rounds);
        for round in 0..config.rounds {
            let mut g = vec![0.0; n];
            let mut h = vec![0.0; n];
            for &(a, b) in &flat.groups {
                accumulate_pairwise(&scores[a..b], &flat.labels[a..b], &mut g[a..b], &mut h[a..b]);
            }
            let active: Vec<bool> = if config.subsample < 1.0 {
                let mut rng = seed::rng(seed::derive(config.seed, round as u64));
                (0..n).map(|_| rng.gen::<f64>() < config.subsample).collect()
            } else {
                vec![true; n]
            };
            let tree = fit_tree_to_gradients(&x, &g, &h, &active, growth);
            for (r, s) in scores.iter_mut().enumerate() {
                let row: Vec<Option<f64>> = flat.columns.iter().map(|c| c[r]).collect();
                *s += config.eta * tree.predict(&row);
            }
            trees.push(tree);
            losses.push(total_loss(&scores, &flat));
        }
        let model = GBRanker {
            version: MODEL_VERSION,
            config,
            feature_hash: feature_hash(&data.feature_names),
            feature_names: data.feature_names.clone(),
            trees,
        };
        Ok((model, TrainReport { losses }))
    }

    /// `base_score + eta * sum of tree outputs`.
    pub fn score(&self, x: &[Option<f64>]) -> f64 {
        self.config.base_score + self.config.eta * self.trees.iter().map(|t| t.predict(x)).sum::<f64>()
    }

    /// Scores a vector after checking it was laid out with the same features.
    pub fn score_checked(&self, hash: &str, x: &[Option<f64>]) -> Result<f64> {
        if hash != self.feature_hash {
            return Err(Error::ManifestMismatch {
                expected: self.feature_hash.clone(),
                found: hash.to_string(),
            });
        }
        if x.len() != self.feature_names.len() {
            return Err(Error::InvalidArgument(format!(
                "vector has {} values, model expects {}",
                x.len(),
                self.feature_names.len()
            )));
        }
        Ok(self.score(x))
    }

    /// Workflow ids by descending score, ties by id, with their scores.
    pub fn rank_workflows(&self, hash: &str, vectors: &[MetafeatureVector]) -> Result<Vec<(String, f64)>> {
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(vectors.len());
        for v in vectors {
            if !seen.insert(v.workflow_id.as_str()) {
                return Err(Error::InvalidArgument(format!("duplicate workflow id {}", v.workflow_id)));
            }
            out.push((v.workflow_id.clone(), self.score_checked(hash, &v.values)?));
        }
        out.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        Ok(out)
    }

    /// Summed split gain per feature, normalized to 1 (all zero without splits).
    pub fn feature_gain(&self) -> Vec<(String, f64)> {
        let mut gains = vec![0.0; self.feature_names.len()];
        for t in &self.trees {
            for (f, g) in t.splits() {
                gains[f] += g;
            }
        }
        let total: f64 = gains.iter().sum();
        if total > 0.0 {
            gains.iter_mut().for_each(|g| *g /= total);
        }
        self.feature_names.iter().cloned().zip(gains).collect()
    }

    /// Writes `feature,gain` rows by descending gain.
    pub fn write_importance(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut rows = self.feature_gain();
        rows.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["feature", "gain"])?;
        for (f, g) in rows {
            w.write_record([f, g.to_string()])?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, serde_json::to_string_pretty(self)?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<GBRanker> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let model: GBRanker = serde_json::from_str(&text)?;
        if model.feature_hash != feature_hash(&model.feature_names) {
            return Err(Error::ManifestMismatch {
                expected: feature_hash(&model.feature_names),
                found: model.feature_hash,
            });
        }
        Ok(model)
    }
}
