//! The meta-dataset: metafeature vectors joined with rank-derived relevance
//! labels, grouped by dataset.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::performance::PerformanceTable;
use super::ranks::{ranks_to_relevance, tie_averaged_ranks};
use crate::error::{Error, Result};
use crate::metafeatures::{read_vectors, write_vectors, MetafeatureVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metatarget {
    pub dataset_id: String,
    pub workflow_id: String,
    pub rank: f64,
    pub relevance: u32,
}

/// Ranks and relevance labels of every record, grouped by dataset.
pub fn metatargets(table: &PerformanceTable) -> Vec<Metatarget> {
    let mut out = Vec::with_capacity(table.len());
    for id in table.dataset_ids() {
        let recs = table.dataset(&id);
        let kappas: Vec<f64> = recs.iter().map(|r| r.mean_kappa).collect();
        let ranks = tie_averaged_ranks(&kappas);
        let rel = ranks_to_relevance(&ranks);
        for ((r, rank), z) in recs.iter().zip(ranks).zip(rel) {
            out.push(Metatarget {
                dataset_id: id.clone(),
                workflow_id: r.workflow_id.clone(),
                rank,
                relevance: z,
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaExample {
    pub workflow_id: String,
    pub x: Vec<Option<f64>>,
    pub rank: f64,
    pub relevance: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaGroup {
    pub dataset_id: String,
    /// Sorted by workflow id.
    pub examples: Vec<MetaExample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetaDataset {
    pub feature_names: Vec<String>,
    /// Sorted by dataset id.
    pub groups: Vec<MetaGroup>,
}

impl MetaDataset {
    pub fn n_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn group(&self, dataset_id: &str) -> Option<&MetaGroup> {
        self.groups.iter().find(|g| g.dataset_id == dataset_id)
    }

    pub fn dataset_ids(&self) -> Vec<String> {
        self.groups.iter().map(|g| g.dataset_id.clone()).collect()
    }

    /// All groups except `dataset_id`.
    pub fn without(&self, dataset_id: &str) -> MetaDataset {
        MetaDataset {
            feature_names: self.feature_names.clone(),
            groups: self.groups.iter().filter(|g| g.dataset_id != dataset_id).cloned().collect(),
        }
    }

    pub fn vectors(&self) -> Vec<MetafeatureVector> {
        self.groups
            .iter()
            .flat_map(|g| {
                g.examples.iter().map(|e| MetafeatureVector {
                    dataset_id: g.dataset_id.clone(),
                    workflow_id: e.workflow_id.clone(),
                    values: e.x.clone(),
                })
            })
            .collect()
    }

    pub fn metatargets(&self) -> Vec<Metatarget> {
        self.groups
            .iter()
            .flat_map(|g| {
                g.examples.iter().map(|e| Metatarget {
                    dataset_id: g.dataset_id.clone(),
                    workflow_id: e.workflow_id.clone(),
                    rank: e.rank,
                    relevance: e.relevance,
                })
            })
            .collect()
    }

    /// Writes `metafeatures.csv` and `metatarget.csv` into `dir`.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        write_vectors(dir.join("metafeatures.csv"), &self.feature_names, &self.vectors())?;
        write_metatargets(dir.join("metatarget.csv"), &self.metatargets())
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let (names, vectors) = read_vectors(dir.join("metafeatures.csv"))?;
        let targets = read_metatargets(dir.join("metatarget.csv"))?;
        join(names, vectors, &targets)
    }
}

pub fn write_metatargets(path: impl AsRef<Path>, targets: &[Metatarget]) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["dataset_id", "workflow_id", "rank", "relevance"])?;
    for t in targets {
        w.write_record([t.dataset_id.clone(), t.workflow_id.clone(), t.rank.to_string(), t.relevance.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_metatargets(path: impl AsRef<Path>) -> Result<Vec<Metatarget>> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        if rec.len() != 4 {
            return Err(Error::malformed(path, "expected 4 columns"));
        }
        let bad = |what: &str| Error::malformed(path, format!("bad {what} {:?}", rec.as_slice()));
        out.push(Metatarget {
            dataset_id: rec[0].to_string(),
            workflow_id: rec[1].to_string(),
            rank: rec[2].parse().map_err(|_| bad("rank"))?,
            relevance: rec[3].parse().map_err(|_| bad("relevance"))?,
        });
    }
    Ok(out)
}

fn join(feature_names: Vec<String>, vectors: Vec<MetafeatureVector>, targets: &[Metatarget]) -> Result<MetaDataset> {
    let mut by_key: HashMap<(String, String), MetafeatureVector> = HashMap::new();
    for v in vectors {
        if v.values.len() != feature_names.len() {
            return Err(Error::InvalidArgument(format!(
                "vector ({}, {}) has {} values, expected {}",
                v.dataset_id,
                v.workflow_id,
                v.values.len(),
                feature_names.len()
            )));
        }
        by_key.insert((v.dataset_id.clone(), v.workflow_id.clone()), v);
    }
    let mut sorted: Vec<&Metatarget> = targets.iter().collect();
    sorted.sort_by(|a, b| (&a.dataset_id, &a.workflow_id).cmp(&(&b.dataset_id, &b.workflow_id)));
    let mut groups: Vec<MetaGroup> = Vec::new();
    for t in sorted {
        let v = by_key
            .remove(&(t.dataset_id.clone(), t.workflow_id.clone()))
            .ok_or_else(|| Error::MissingJoin {
                dataset: t.dataset_id.clone(),
                workflow: t.workflow_id.clone(),
            })?;
        if groups.last().is_none_or(|g| g.dataset_id != t.dataset_id) {
            groups.push(MetaGroup {
                dataset_id: t.dataset_id.clone(),
                examples: Vec::new(),
            });
        }
        groups.last_mut().expect("group pushed").examples.push(MetaExample {
            workflow_id: t.workflow_id.clone(),
            x: v.values,
            rank: t.rank,
            relevance: t.relevance,
        });
    }
    Ok(MetaDataset { feature_names, groups })
}

/// Joins the performance table with one metafeature vector per record.
/// Every record needs a vector; extra vectors are ignored.
pub fn assemble(performance: &PerformanceTable, feature_names: &[String], vectors: &[MetafeatureVector]) -> Result<MetaDataset> {
    join(feature_names.to_vec(), vectors.to_vec(), &metatargets(performance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metadb::PerformanceRecord;

    fn perf() -> PerformanceTable {
        let recs = [("b", "w1", 0.2), ("b", "w2", 0.4), ("a", "w1", 0.9), ("a", "w2", 0.9)]
            .iter()
            .map(|&(d, w, k)| PerformanceRecord {
                dataset_id: d.into(),
                workflow_id: w.into(),
                fold_kappas: vec![Some(k)],
                mean_kappa: k,
                flagged: false,
            })
            .collect();
        PerformanceTable::new(recs).unwrap()
    }

    fn vectors() -> Vec<MetafeatureVector> {
        ["a", "b"]
            .iter()
            .flat_map(|d| {
                ["w1", "w2"].iter().map(move |w| MetafeatureVector {
                    dataset_id: d.to_string(),
                    workflow_id: w.to_string(),
                    values: vec![Some(1.0 / 7.0), None],
                })
            })
            .collect()
    }

    #[test]
    fn assemble_groups_and_labels() {
        let names = vec!["f1".to_string(), "f2".to_string()];
        let m = assemble(&perf(), &names, &vectors()).unwrap();
        assert_eq!(m.dataset_ids(), vec!["a", "b"]);
        let a = m.group("a").unwrap();
        assert_eq!(a.examples.iter().map(|e| e.relevance).collect::<Vec<_>>(), vec![1, 1]);
        let b = m.group("b").unwrap();
        assert_eq!(b.examples.iter().map(|e| e.relevance).collect::<Vec<_>>(), vec![1, 2]);
    }

    #[test]
    fn missing_join_fails() {
        let names = vec!["f1".to_string(), "f2".to_string()];
        let mut v = vectors();
        v.pop();
        assert!(matches!(assemble(&perf(), &names, &v), Err(Error::MissingJoin { .. })));
    }

    #[test]
    fn persistence_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let names = vec!["f1".to_string(), "f2".to_string()];
        let m = assemble(&perf(), &names, &vectors()).unwrap();
        m.save(dir.path()).unwrap();
        assert_eq!(MetaDataset::load(dir.path()).unwrap(), m);
    }
}
