//! Aggregation of LODO folds into the benchmark report, invariant audits and
//! file exports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::lodo::{oracle_and_bagging100, LodoFold};
use super::metrics::{best_at_n, loss_curve, map_at_k};
use super::stats::{friedman_nemenyi, CdResult};
use crate::error::{Error, Result};
use crate::metadb::PerformanceTable;

pub const METHODS: [&str; 6] = ["autoBagging@1", "autoBagging@3", "autoBagging@5", "average_rank", "bagging100", "oracle"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkOptions {
    pub map_k: usize,
    pub alpha: f64,
}

impl Default for BenchmarkOptions {
    fn default() -> Self {
        BenchmarkOptions { map_k: 10, alpha: 0.05 }
    }
}

/// Realized kappa of every method on one held-out dataset, in [`METHODS`] order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseLevelRow {
    pub dataset_id: String,
    pub kappas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub options: BenchmarkOptions,
    pub folds: Vec<LodoFold>,
    /// Per dataset: `(AP@k autoBagging, AP@k average rank)`.
    pub map_per_dataset: Vec<(String, f64, f64)>,
    pub map_autobagging: f64,
    pub map_average_rank: f64,
    /// Mean loss curve per ranking method.
    pub loss_curves: BTreeMap<String, Vec<f64>>,
    pub base_level: Vec<BaseLevelRow>,
    pub cd: Option<CdResult>,
    pub audit: Vec<AuditCheck>,
}

impl BenchmarkReport {
    pub fn audit_passed(&self) -> bool {
        self.audit.iter().all(|a| a.passed)
    }

    /// Mean over datasets of the realized kappa of `method`.
    pub fn mean_kappa(&self, method: &str) -> Option<f64> {
        let j = METHODS.iter().position(|m| *m == method)?;
        let n = self.base_level.len() as f64;
        Some(self.base_level.iter().map(|r| r.kappas[j]).sum::<f64>() / n)
    }

    pub fn loss_at(&self, method: &str, n: usize) -> Option<f64> {
        self.loss_curves.get(method).and_then(|c| c.get(n - 1)).copied()
    }
}

fn mean_curve(curves: &[Vec<f64>]) -> Vec<f64> {
    let len = curves.iter().map(Vec::len).max().unwrap_or(0);
    (0..len)
        .map(|i| curves.iter().map(|c| c[i.min(c.len() - 1)]).sum::<f64>() / curves.len() as f64)
        .collect()
}

fn check(name: &str, failures: Vec<String>) -> AuditCheck {
    AuditCheck {
        name: name.to_string(),
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            "ok".into()
        } else {
            failures.join("; ")
        },
    }
}

fn audits(folds: &[LodoFold], base: &[BaseLevelRow], per_dataset_curves: &[(String, Vec<Vec<f64>>)], performance: &PerformanceTable) -> Vec<AuditCheck> {
    let mut out = Vec::new();
    out.push(check(
        "no_leakage",
        folds
            .iter()
            .filter(|f| !f.leakage_free || f.training_ids.contains(&f.dataset_id))
            .map(|f| f.dataset_id.clone())
            .collect(),
    ));
    out.push(check(
        "permutation",
        folds
            .iter()
            .filter(|f| {
                let mut p = f.predicted.clone();
                p.sort();
                p.dedup();
                p.len() != f.kappas.len() || p.iter().any(|w| !f.kappas.contains_key(w))
            })
            .map(|f| f.dataset_id.clone())
            .collect(),
    ));
    let oracle = METHODS.len() - 1;
    out.push(check(
        "oracle_dominance",
        base.iter()
            .filter(|r| r.kappas.iter().any(|&k| k > r.kappas[oracle]))
            .map(|r| r.dataset_id.clone())
            .collect(),
    ));
    out.push(check(
        "top_n_monotone",
        base.iter()
            .filter(|r| !(r.kappas[0] <= r.kappas[1] && r.kappas[1] <= r.kappas[2]))
            .map(|r| r.dataset_id.clone())
            .collect(),
    ));
    out.push(check(
        "loss_curves",
        per_dataset_curves
            .iter()
            .filter(|(_, cs)| {
                cs.iter()
                    .any(|c| c.windows(2).any(|w| w[1] > w[0]) || c.last().is_none_or(|&l| l != 0.0))
            })
            .map(|(d, _)| d.clone())
            .collect(),
    ));
    out.push(check(
        "rank_sum",
        performance
            .dataset_ids()
            .into_iter()
            .filter(|d| {
                let ranks = performance.ranks(d);
                let n = ranks.len() as f64;
                (ranks.values().sum::<f64>() - n * (n + 1.0) / 2.0).abs() > 1e-9
            })
            .collect(),
    ));
    out
}

/// Aggregates LODO folds: MAP@k, loss curves, base-level kappas, CD data
/// and invariant audits.
pub fn benchmark(folds: Vec<LodoFold>, performance: &PerformanceTable, options: BenchmarkOptions) -> Result<BenchmarkReport> {
    if folds.is_empty() {
        return Err(Error::InvalidArgument("no folds to aggregate".into()));
    }
    let mut map_per_dataset = Vec::new();
    let mut base_level = Vec::new();
    let mut auto_curves = Vec::new();
    let mut avg_curves = Vec::new();
    let mut per_dataset_curves = Vec::new();
    for f in &folds {
        let ap_auto = map_at_k(&f.predicted, &f.kappas, options.map_k);
        let ap_avg = map_at_k(&f.average_rank, &f.kappas, options.map_k);
        map_per_dataset.push((f.dataset_id.clone(), ap_auto, ap_avg));

        let (oracle, bagging100) = oracle_and_bagging100(performance, &f.dataset_id)?;
        let n = f.predicted.len();
        base_level.push(BaseLevelRow {
            dataset_id: f.dataset_id.clone(),
            kappas: vec![
                best_at_n(&f.predicted, &f.kappas, 1.min(n)),
                best_at_n(&f.predicted, &f.kappas, 3.min(n)),
                best_at_n(&f.predicted, &f.kappas, 5.min(n)),
                best_at_n(&f.average_rank, &f.kappas, 1),
                bagging100,
                oracle,
            ],
        });
        let a = loss_curve(&f.predicted, &f.kappas);
        let b = loss_curve(&f.average_rank, &f.kappas);
        per_dataset_curves.push((f.dataset_id.clone(), vec![a.clone(), b.clone()]));
        auto_curves.push(a);
        avg_curves.push(b);
    }
    let m = folds.len() as f64;
    let map_autobagging = map_per_dataset.iter().map(|x| x.1).sum::<f64>() / m;
    let map_average_rank = map_per_dataset.iter().map(|x| x.2).sum::<f64>() / m;
    let loss_curves = BTreeMap::from([
        ("autoBagging".to_string(), mean_curve(&auto_curves)),
        ("average_rank".to_string(), mean_curve(&avg_curves)),
    ]);
    let methods: Vec<String> = METHODS.iter().map(|s| s.to_string()).collect();
    let matrix: Vec<Vec<f64>> = base_level.iter().map(|r| r.kappas.clone()).collect();
    let cd = if matrix.len() >= 3 {
        Some(friedman_nemenyi(&methods, &matrix, options.alpha)?)
    } else {
        None
    };
    let audit = audits(&folds, &base_level, &per_dataset_curves, performance);
    Ok(BenchmarkReport {
        options,
        folds,
        map_per_dataset,
        map_autobagging,
        map_average_rank,
        loss_curves,
        base_level,
        cd,
        audit,
    })
}

fn write(dir: &Path, name: &str, text: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

/// Writes loss_curve.csv, map_meta.csv, base_level_kappa.csv,
/// cd_diagram.json, rank_boxplot.csv, lodo_rankings.csv and audit.json.
pub fn export_results(report: &BenchmarkReport, performance: &PerformanceTable, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let mut s = String::from("method,n,loss\n");
    for (method, curve) in &report.loss_curves {
        for (i, l) in curve.iter().enumerate() {
            writeln!(s, "{method},{},{l}", i + 1).expect("write to string");
        }
    }
    write(dir, "loss_curve.csv", &s)?;

    let mut s = String::from("dataset_id,autoBagging,average_rank\n");
    for (d, a, b) in &report.map_per_dataset {
        writeln!(s, "{d},{a},{b}").expect("write to string");
    }
    writeln!(s, "mean,{},{}", report.map_autobagging, report.map_average_rank).expect("write to string");
    write(dir, "map_meta.csv", &s)?;

    let mut s = format!("dataset_id,{}\n", METHODS.join(","));
    for r in &report.base_level {
        let cells: Vec<String> = r.kappas.iter().map(f64::to_string).collect();
        writeln!(s, "{},{}", r.dataset_id, cells.join(",")).expect("write to string");
    }
    write(dir, "base_level_kappa.csv", &s)?;

    write(dir, "cd_diagram.json", &serde_json::to_string_pretty(&report.cd)?)?;

    let mut s = String::from("dataset_id,workflow_id,rank\n");
    for d in performance.dataset_ids() {
        for (w, r) in performance.ranks(&d) {
            writeln!(s, "{d},{w},{r}").expect("write to string");
        }
    }
    write(dir, "rank_boxplot.csv", &s)?;

    let mut s = String::from("dataset_id,position,workflow_id,score\n");
    for f in &report.folds {
        for (i, (w, sc)) in f.predicted.iter().zip(&f.scores).enumerate() {
            writeln!(s, "{},{},{w},{sc}", f.dataset_id, i + 1).expect("write to string");
        }
    }
    write(dir, "lodo_rankings.csv", &s)?;

    write(dir, "audit.json", &serde_json::to_string_pretty(&report.audit)?)
}
