//! The base-level performance table: k-fold kappa of every workflow on every
//! dataset, persisted to `performance.csv` one complete record at a time so
//! an interrupted build can resume.

use std::collections::{BTreeMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ranks::tie_averaged_ranks;
use crate::dataset::{stratified_folds, Dataset, FoldAssignment};
use crate::error::{Error, Result};
use crate::seed;
use crate::workflows::{evaluate_grid, WorkflowConfig, WorkflowSettings};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceRecord {
    pub dataset_id: String,
    pub workflow_id: String,
    /// One entry per fold; `None` for a skipped fold.
    pub fold_kappas: Vec<Option<f64>>,
    pub mean_kappa: f64,
    /// Some fold was skipped, or the dataset could not be evaluated.
    pub flagged: bool,
}

impl PerformanceRecord {
    fn key(&self) -> (&str, &str) {
        (&self.dataset_id, &self.workflow_id)
    }
}

/// Records sorted by `(dataset_id, workflow_id)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PerformanceTable {
    records: Vec<PerformanceRecord>,
}

impl PerformanceTable {
    /// Sorts the records; duplicate keys are an error.
    pub fn new(mut records: Vec<PerformanceRecord>) -> Result<Self> {
        records.sort_by(|a, b| a.key().cmp(&b.key()));
        if let Some(w) = records.windows(2).find(|w| w[0].key() == w[1].key()) {
            return Err(Error::InvalidArgument(format!(
                "duplicate performance record ({}, {})",
                w[0].dataset_id, w[0].workflow_id
            )));
        }
        Ok(PerformanceTable { records })
    }

    pub fn records(&self) -> &[PerformanceRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn dataset_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.records.iter().map(|r| r.dataset_id.clone()).collect();
        ids.dedup();
        ids
    }

    /// Records of one dataset, sorted by workflow id.
    pub fn dataset(&self, id: &str) -> &[PerformanceRecord] {
        let lo = self.records.partition_point(|r| r.dataset_id.as_str() < id);
        let hi = self.records.partition_point(|r| r.dataset_id.as_str() <= id);
        &self.records[lo..hi]
    }

    pub fn get(&self, dataset_id: &str, workflow_id: &str) -> Option<&PerformanceRecord> {
        self.records
            .binary_search_by(|r| r.key().cmp(&(dataset_id, workflow_id)))
            .ok()
            .map(|i| &self.records[i])
    }

    /// Tie-averaged ranks (1 = best mean kappa) of the workflows of one dataset.
    pub fn ranks(&self, dataset_id: &str) -> BTreeMap<String, f64> {
        let recs = self.dataset(dataset_id);
        let kappas: Vec<f64> = recs.iter().map(|r| r.mean_kappa).collect();
        recs.iter()
            .zip(tie_averaged_ranks(&kappas))
            .map(|(r, rank)| (r.workflow_id.clone(), rank))
            .collect()
    }

    /// The table restricted to the given datasets.
    pub fn subset(&self, dataset_ids: &[String]) -> PerformanceTable {
        let keep: HashSet<&str> = dataset_ids.iter().map(String::as_str).collect();
        PerformanceTable {
            records: self
                .records
                .iter()
                .filter(|r| keep.contains(r.dataset_id.as_str()))
                .cloned()
                .collect(),
        }
    }

    pub fn n_folds(&self) -> usize {
        self.records.iter().map(|r| r.fold_kappas.len()).max().unwrap_or(0)
    }

    /// Writes the canonical (sorted) CSV.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let k = self.n_folds();
        let mut out = header(k);
        for r in &self.records {
            out.push_str(&format_record(r, k));
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    /// Strict load: any malformed row is an error.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let (records, bad) = read_records(path)?;
        if let Some((line, reason)) = bad.first() {
            return Err(Error::malformed(path, format!("line {line}: {reason}")));
        }
        PerformanceTable::new(records)
    }
}

fn header(k: usize) -> String {
    let folds: Vec<String> = (1..=k).map(|f| format!("fold{f}")).collect();
    format!("dataset_id,workflow_id,{},mean_kappa,flagged\n", folds.join(","))
}

fn format_record(r: &PerformanceRecord, k: usize) -> String {
    let mut cells = vec![r.dataset_id.clone(), r.workflow_id.clone()];
    for f in 0..k {
        cells.push(r.fold_kappas.get(f).copied().flatten().map_or(String::new(), |v| v.to_string()));
    }
    cells.push(r.mean_kappa.to_string());
    cells.push(r.flagged.to_string());
    format!("{}\n", cells.join(","))
}

fn parse_line(line: &str, k: usize) -> std::result::Result<PerformanceRecord, String> {
    let cells: Vec<&str> = line.split(',').collect();
    if cells.len() != k + 4 {
        return Err(format!("expected {} fields, found {}", k + 4, cells.len()));
    }
    let num = |s: &str| s.parse::<f64>().map_err(|_| format!("bad number {s:?}"));
    let mut fold_kappas = Vec::with_capacity(k);
    for c in &cells[2..2 + k] {
        fold_kappas.push(if c.is_empty() { None } else { Some(num(c)?) });
    }
    let mean_kappa = num(cells[k + 2])?;
    let flagged = match cells[k + 3] {
        "true" => true,
        "false" => false,
        other => return Err(format!("bad flag {other:?}")),
    };
    if cells[0].is_empty() || cells[1].is_empty() {
        return Err("empty key".into());
    }
    Ok(PerformanceRecord {
        dataset_id: cells[0].to_string(),
        workflow_id: cells[1].to_string(),
        fold_kappas,
        mean_kappa,
        flagged,
    })
}

fn fold_count(header_line: &str) -> Option<usize> {
    let cells: Vec<&str> = header_line.split(',').collect();
    let ok = cells.len() >= 4
        && cells[0] == "dataset_id"
        && cells[1] == "workflow_id"
        && cells[cells.len() - 2] == "mean_kappa"
        && cells[cells.len() - 1] == "flagged";
    ok.then(|| cells.len() - 4)
}

type BadLine = (usize, String);

/// Parses every line, separating good records from malformed lines (1-based
/// line number and reason). Later duplicates of a key are treated as malformed.
fn read_records(path: &Path) -> Result<(Vec<PerformanceRecord>, Vec<BadLine>)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(file).lines();
    let head = match lines.next() {
        Some(h) => h.map_err(|e| Error::io(path, e))?,
        None => return Ok((Vec::new(), Vec::new())),
    };
    let k = fold_count(head.trim_end()).ok_or_else(|| Error::malformed(path, "unrecognized header"))?;
    let mut seen = HashSet::new();
    let (mut good, mut bad) = (Vec::new(), Vec::new());
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        match parse_line(line, k) {
            Ok(r) if seen.insert((r.dataset_id.clone(), r.workflow_id.clone())) => good.push(r),
            Ok(_) => bad.push((i + 2, "duplicate key".to_string())),
            Err(reason) => bad.push((i + 2, reason)),
        }
    }
    Ok((good, bad))
}

/// Per-dataset seed; folds use `derive(s, 0)` and tree banks `derive(s, 1)`.
pub fn dataset_seed(seed: u64, dataset_id: &str) -> u64 {
    seed::derive_str(seed, dataset_id)
}

/// The fold assignment used for a dataset's base-level evaluation.
pub fn dataset_folds(d: &Dataset, k: usize, seed: u64) -> Result<FoldAssignment> {
    stratified_folds(d, k, seed::derive(dataset_seed(seed, &d.id), 0))
}

/// Evaluates every workflow on one dataset.
pub fn evaluate_dataset(
    d: &Dataset,
    configs: &[WorkflowConfig],
    k_folds: usize,
    seed: u64,
    settings: &WorkflowSettings,
) -> Vec<PerformanceRecord> {
    let grid_seed = seed::derive(dataset_seed(seed, &d.id), 1);
    match dataset_folds(d, k_folds, seed) {
        Ok(folds) => evaluate_grid(d, &folds, configs, grid_seed, settings)
            .into_iter()
            .map(|o| PerformanceRecord {
                dataset_id: d.id.clone(),
                workflow_id: o.config.id(),
                fold_kappas: o.fold_kappas,
                mean_kappa: o.mean_kappa,
                flagged: o.flagged,
            })
            .collect(),
        Err(_) => configs
            .iter()
            .map(|c| PerformanceRecord {
                dataset_id: d.id.clone(),
                workflow_id: c.id(),
                fold_kappas: vec![None; k_folds],
                mean_kappa: 0.0,
                flagged: true,
            })
            .collect(),
    }
}

/// Single writer appending complete lines to `performance.csv`.
struct Appender {
    file: File,
    k: usize,
}

impl Appender {
    fn append(&mut self, records: &[PerformanceRecord]) -> std::io::Result<()> {
        let mut buf = String::new();
        for r in records {
            buf.push_str(&format_record(r, self.k));
        }
        self.file.write_all(buf.as_bytes())?;
        self.file.flush()
    }
}

/// Outcome of [`build_performance_table`].
#[derive(Debug, Clone, PartialEq)]
pub struct BuildReport {
    pub table: PerformanceTable,
    /// Records already present in the store and reused.
    pub reused: usize,
    /// Records computed by this call.
    pub computed: usize,
    /// Malformed store lines moved to the quarantine file.
    pub quarantined: usize,
}

/// Path of the quarantine file next to a performance store.
pub fn quarantine_path(store: &Path) -> PathBuf {
    store.with_extension("quarantine.csv")
}

/// Evaluates `configs` on every dataset with `k_folds`-fold CV.
///
/// With a `store`, existing complete records are reused, missing ones are
/// appended as each dataset finishes, malformed lines are moved to the
/// quarantine file, and the store is finally rewritten in canonical order.
pub fn build_performance_table(
    datasets: &[Dataset],
    configs: &[WorkflowConfig],
    k_folds: usize,
    seed: u64,
    settings: &WorkflowSettings,
    store: Option<&Path>,
) -> Result<BuildReport> {
    let mut existing = Vec::new();
    let mut quarantined = 0;
    if let Some(path) = store.filter(|p| p.exists()) {
        let (good, bad) = read_records(path)?;
        if let Some(r) = good.iter().find(|r| r.fold_kappas.len() != k_folds) {
            return Err(Error::InvalidArgument(format!(
                "{} holds {}-fold records, build asked for {k_folds} folds",
                path.display(),
                r.fold_kappas.len()
            )));
        }
        if !bad.is_empty() {
            let text: String = bad.iter().map(|(l, reason)| format!("{l},{reason}\n")).collect();
            let q = quarantine_path(path);
            std::fs::write(&q, format!("line,reason\n{text}")).map_err(|e| Error::io(&q, e))?;
            quarantined = bad.len();
        }
        existing = good;
    }

    let wanted: HashSet<(String, String)> = datasets
        .iter()
        .flat_map(|d| configs.iter().map(move |c| (d.id.clone(), c.id())))
        .collect();
    existing.retain(|r| wanted.contains(&(r.dataset_id.clone(), r.workflow_id.clone())));
    let have: HashSet<(String, String)> = existing
        .iter()
        .map(|r| (r.dataset_id.clone(), r.workflow_id.clone()))
        .collect();

    let appender = match store {
        Some(path) => {
            // rewrite the surviving records so the store holds no malformed lines
            let mut text = header(k_folds);
            for r in &existing {
                text.push_str(&format_record(r, k_folds));
            }
            std::fs::write(path, text).map_err(|e| Error::io(path, e))?;
            let file = OpenOptions::new().append(true).open(path).map_err(|e| Error::io(path, e))?;
            Some(Mutex::new(Appender { file, k: k_folds }))
        }
        None => None,
    };

    let computed: Vec<Vec<PerformanceRecord>> = datasets
        .par_iter()
        .map(|d| -> Result<Vec<PerformanceRecord>> {
            let missing: Vec<WorkflowConfig> = configs
                .iter()
                .filter(|c| !have.contains(&(d.id.clone(), c.id())))
                .copied()
                .collect();
            if missing.is_empty() {
                return Ok(Vec::new());
            }
            let recs = evaluate_dataset(d, &missing, k_folds, seed, settings);
            if let (Some(app), Some(path)) = (&appender, store) {
                let mut guard = app.lock().expect("appender lock");
                guard.append(&recs).map_err(|e| Error::io(path, e))?;
            }
            Ok(recs)
        })
        .collect::<Result<_>>()?;

    let reused = existing.len();
    let new: Vec<PerformanceRecord> = computed.into_iter().flatten().collect();
    let n_new = new.len();
    existing.extend(new);
    let table = PerformanceTable::new(existing)?;
    if let Some(path) = store {
        table.save(path)?;
    }
    Ok(BuildReport {
        table,
        reused,
        computed: n_new,
        quarantined,
    })
}
