//! Evaluation of the registry on a (dataset, workflow) pair.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::functions::{entropy, eta_squared, mutual_information, pearson, postprocess, skewness, PostProcessor};
use super::landmarkers::{compute_landmarkers, LandmarkerResults};
use super::mic::{mic_with, MicParams};
use super::r_value::r_values;
use super::registry::{Block, InputObject, MetaFunction, MetafeatureSpec, Registry};
use crate::dataset::{stratified_folds, Dataset};
use crate::error::{Error, Result};
use crate::metadb::PerformanceTable;
use crate::seed;
use crate::workflows::WorkflowConfig;

/// Folds used by the landmarkers.
pub const LANDMARKER_FOLDS: usize = 4;

/// 158 values in registry order; `None` is missing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetafeatureVector {
    pub dataset_id: String,
    pub workflow_id: String,
    pub values: Vec<Option<f64>>,
}

/// Workflow-independent entries of a dataset's vectors. Workflow and rank
/// entries are left missing here and filled in by [`compute_vector`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetProfile {
    pub dataset_id: String,
    pub registry_hash: String,
    pub values: Vec<Option<f64>>,
    pub landmarkers: LandmarkerResults,
}

struct Context<'a> {
    d: &'a Dataset,
    registry: &'a Registry,
    landmarkers: LandmarkerResults,
    continuous: Vec<&'a [Option<f64>]>,
    discrete: Vec<Vec<Option<usize>>>,
    target: Vec<Option<usize>>,
}

impl Context<'_> {
    fn discrete_object(&self, o: InputObject) -> Vec<Vec<Option<usize>>> {
        match o {
            InputObject::DiscreteAttributes => self.discrete.clone(),
            InputObject::Target => vec![self.target.clone()],
            InputObject::Landmarker(l) => vec![self.landmarkers.predictions(l).iter().map(|&p| Some(p)).collect()],
            _ => Vec::new(),
        }
    }

    fn pairs<T>(items: &[T], same: bool, other: &[T]) -> Vec<(usize, usize)> {
        if same {
            (0..items.len())
                .flat_map(|i| (i + 1..items.len()).map(move |j| (i, j)))
                .collect()
        } else {
            (0..items.len())
                .flat_map(|i| (0..other.len()).map(move |j| (i, j)))
                .collect()
        }
    }

    /// The value multiset of a meta-function over its input objects.
    fn raw(&self, f: MetaFunction, inputs: &[InputObject]) -> Vec<f64> {
        let cfg = self.registry.config;
        match (f, inputs) {
            (MetaFunction::Skewness, _) => self.continuous.iter().filter_map(|c| skewness(c)).collect(),
            (MetaFunction::Pearson | MetaFunction::Mic, _) => {
                let params = MicParams {
                    alpha: cfg.mic_alpha,
                    c: cfg.mic_clumps,
                };
                Self::pairs(&self.continuous, true, &[])
                    .into_iter()
                    .filter_map(|(i, j)| {
                        let (a, b) = (self.continuous[i], self.continuous[j]);
                        if f == MetaFunction::Pearson {
                            pearson(a, b)
                        } else {
                            mic_with(a, b, params)
                        }
                    })
                    .collect()
            }
            (MetaFunction::Entropy, [o]) => self.discrete_object(*o).iter().filter_map(|c| entropy(c)).collect(),
            (MetaFunction::MutualInformation, [a, b]) => {
                let xs = self.discrete_object(*a);
                let ys = self.discrete_object(*b);
                Self::pairs(&xs, a == b, &ys)
                    .into_iter()
                    .filter_map(|(i, j)| mutual_information(&xs[i], if a == b { &xs[j] } else { &ys[j] }))
                    .collect()
            }
            (MetaFunction::EtaSquared, [_, b]) => {
                let groups = self.discrete_object(*b);
                self.continuous
                    .iter()
                    .flat_map(|c| groups.iter().filter_map(move |g| eta_squared(c, g)))
                    .collect()
            }
            (MetaFunction::RValue, _) => r_values(self.d, cfg.r_value_k, cfg.r_value_theta),
            (MetaFunction::NExamples, _) => vec![self.d.n() as f64],
            (MetaFunction::NAttributes, _) => vec![self.d.n_features() as f64],
            (MetaFunction::NClasses, _) => vec![self.d.n_classes() as f64],
            (MetaFunction::Accuracy, [InputObject::Landmarker(l), ..]) => vec![self.landmarkers.accuracy(*l)],
            _ => Vec::new(),
        }
    }
}

fn is_dataset_spec(s: &MetafeatureSpec) -> bool {
    s.block != Block::Workflow && s.function != MetaFunction::Rank
}

/// Computes the workflow-independent entries of `d`.
pub fn profile_dataset(d: &Dataset, registry: &Registry, seed: u64) -> Result<DatasetProfile> {
    let folds = stratified_folds(d, LANDMARKER_FOLDS, seed::derive_str(seed, "landmarkers"))?;
    let landmarkers = compute_landmarkers(d, &folds);
    let ctx = Context {
        d,
        registry,
        landmarkers,
        continuous: d.numeric_columns().map(|(_, c)| c).collect(),
        discrete: d
            .categorical_columns()
            .map(|(_, c)| c.iter().map(|v| v.map(|x| x as usize)).collect())
            .collect(),
        target: d.target.iter().map(|&t| Some(t)).collect(),
    };
    let mut cache: HashMap<(MetaFunction, Vec<InputObject>), Vec<f64>> = HashMap::new();
    let values = registry
        .specs
        .iter()
        .map(|s| {
            if !is_dataset_spec(s) {
                return None;
            }
            let raw = cache
                .entry((s.function, s.inputs.clone()))
                .or_insert_with(|| ctx.raw(s.function, &s.inputs));
            postprocess(raw, s.post)
        })
        .collect();
    Ok(DatasetProfile {
        dataset_id: d.id.clone(),
        registry_hash: registry.hash.clone(),
        values,
        landmarkers: ctx.landmarkers,
    })
}

/// Ranks of every workflow across the datasets of a (training) table.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RankTable {
    pub ranks: BTreeMap<String, Vec<f64>>,
}

impl RankTable {
    pub fn from_performance(table: &PerformanceTable) -> Self {
        let mut ranks: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for id in table.dataset_ids() {
            for (wf, r) in table.ranks(&id) {
                ranks.entry(wf).or_default().push(r);
            }
        }
        RankTable { ranks }
    }

    /// Rank distribution of one workflow; `None` for an unseen workflow.
    pub fn get(&self, workflow_id: &str) -> Option<&[f64]> {
        self.ranks.get(workflow_id).map(Vec::as_slice)
    }
}

/// Rank feature of one workflow under a post-processor.
pub fn rank_feature(workflow_id: &str, ranks: &RankTable, post: PostProcessor) -> Option<f64> {
    ranks.get(workflow_id).and_then(|r| postprocess(r, post))
}

fn workflow_value(f: MetaFunction, c: &WorkflowConfig) -> Option<f64> {
    match f {
        MetaFunction::NTrees => Some(c.n_models as f64),
        MetaFunction::PruningMethod => Some(c.pruning.code()),
        MetaFunction::CutPoint => c.cut_point.map(|p| p.fraction()),
        MetaFunction::IntegrationMethod => Some(c.integration.code()),
        _ => None,
    }
}

/// Completes a dataset profile with the workflow block and rank features.
pub fn compute_vector(profile: &DatasetProfile, config: &WorkflowConfig, ranks: &RankTable, registry: &Registry) -> Result<MetafeatureVector> {
    if profile.registry_hash != registry.hash {
        return Err(Error::ManifestMismatch {
            expected: registry.hash.clone(),
            found: profile.registry_hash.clone(),
        });
    }
    let wid = config.id();
    let values = registry
        .specs
        .iter()
        .zip(&profile.values)
        .map(|(s, v)| match (s.block, s.function) {
            (Block::Workflow, f) => workflow_value(f, config),
            (_, MetaFunction::Rank) => rank_feature(&wid, ranks, s.post),
            _ => *v,
        })
        .collect();
    Ok(MetafeatureVector {
        dataset_id: profile.dataset_id.clone(),
        workflow_id: wid,
        values,
    })
}

/// Profiles `d` and completes it for one workflow, with rank features taken
/// from `training` (which must not contain `d`).
pub fn compute_vector_for(
    d: &Dataset,
    config: &WorkflowConfig,
    training: &PerformanceTable,
    registry: &Registry,
    seed: u64,
) -> Result<MetafeatureVector> {
    let profile = profile_dataset(d, registry, seed)?;
    compute_vector(&profile, config, &RankTable::from_performance(training), registry)
}

fn cell(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

/// Writes vectors as CSV: `dataset_id,workflow_id,<names...>`, missing empty.
pub fn write_vectors(path: impl AsRef<Path>, names: &[String], vectors: &[MetafeatureVector]) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    let mut head = vec!["dataset_id".to_string(), "workflow_id".to_string()];
    head.extend(names.iter().cloned());
    w.write_record(&head)?;
    for v in vectors {
        assert_eq!(v.values.len(), names.len(), "vector width");
        let mut row = vec![v.dataset_id.clone(), v.workflow_id.clone()];
        row.extend(v.values.iter().map(|&x| cell(x)));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads vectors written by [`write_vectors`], returning the column names.
pub fn read_vectors(path: impl AsRef<Path>) -> Result<(Vec<String>, Vec<MetafeatureVector>)> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path)?;
    let head = r.headers()?.clone();
    if head.len() < 2 || &head[0] != "dataset_id" || &head[1] != "workflow_id" {
        return Err(Error::malformed(path, "expected dataset_id,workflow_id header"));
    }
    let names: Vec<String> = head.iter().skip(2).map(String::from).collect();
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let values = rec
            .iter()
            .skip(2)
            .map(|s| {
                if s.is_empty() {
                    Ok(None)
                } else {
                    s.parse::<f64>()
                        .map(Some)
                        .map_err(|_| Error::malformed(path, format!("bad value {s:?}")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(MetafeatureVector {
            dataset_id: rec[0].to_string(),
            workflow_id: rec[1].to_string(),
            values,
        });
    }
    Ok((names, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Column;
    use crate::metadb::PerformanceRecord;
    use crate::metafeatures::{build_registry, RegistryConfig};
    use crate::workflows::parse_workflow_id;

    fn categorical_only() -> Dataset {
        let a: Vec<Option<&str>> = (0..40).map(|i| Some(if i % 3 == 0 { "x" } else { "y" })).collect();
        let labels: Vec<&str> = (0..40).map(|i| if i % 2 == 0 { "p" } else { "q" }).collect();
        Dataset::new("cats", vec![Column::categorical("a", &a)], "class", &labels).unwrap()
    }

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
    fn no_numeric_columns_leaves_numeric_features_missing() {
        let reg = build_registry(RegistryConfig::default()).unwrap();
        let d = categorical_only();
        let c = parse_workflow_id("200bb0.75knora-e").unwrap();
        let v = compute_vector_for(&d, &c, &PerformanceTable::default(), &reg, 1).unwrap();
        assert_eq!(v.values.len(), 158);
        for (s, x) in reg.specs.iter().zip(&v.values) {
            if matches!(s.function, MetaFunction::Skewness | MetaFunction::Pearson | MetaFunction::Mic) {
                assert!(x.is_none(), "{}", s.name);
            }
        }
        let at = |n: &str| v.values[reg.index_of(n).unwrap()];
        assert_eq!(at("workflow.n_trees"), Some(200.0));
        assert_eq!(at("workflow.pruning"), Some(2.0));
        assert_eq!(at("workflow.cut_point"), Some(0.75));
        assert_eq!(at("workflow.integration"), Some(2.0));
        assert_eq!(at("class.entropy"), Some(1.0));
        assert_eq!(at("n_examples"), Some(40.0));
        assert_eq!(at("rank.avg"), None);
        let again = compute_vector_for(&d, &c, &PerformanceTable::default(), &reg, 1).unwrap();
        assert_eq!(v, again);
    }

    #[test]
    fn rank_features_from_training_table() {
        let t = table(&[("d1", "w", 0.9), ("d1", "v", 0.5), ("d2", "w", 0.1), ("d2", "v", 0.5), ("d2", "u", 0.2)]);
        let ranks = RankTable::from_performance(&t);
        assert_eq!(rank_feature("w", &ranks, PostProcessor::Avg), Some(2.0));
        assert_eq!(rank_feature("w", &ranks, PostProcessor::Sd), Some(1.0));
        assert_eq!(rank_feature("zz", &ranks, PostProcessor::Avg), None);
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mf.csv");
        let names = vec!["a".to_string(), "b.c".to_string()];
        let vs = vec![MetafeatureVector {
            dataset_id: "d".into(),
            workflow_id: "100nonenone".into(),
            values: vec![Some(0.1 + 0.2), None],
        }];
        write_vectors(&path, &names, &vs).unwrap();
        assert_eq!(read_vectors(&path).unwrap(), (names, vs));
    }
}
