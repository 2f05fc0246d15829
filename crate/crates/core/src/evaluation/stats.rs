//! Friedman test and Nemenyi critical difference over a method × dataset
//! score matrix.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor};

use crate::error::{Error, Result};
use crate::metadb::tie_averaged_ranks;

/// Studentized-range based critical values `q_alpha` for k = 2..=10 methods.
const Q_005: [f64; 9] = [1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164];
const Q_010: [f64; 9] = [1.645, 2.052, 2.291, 2.459, 2.589, 2.693, 2.780, 2.855, 2.920];

pub fn nemenyi_q(alpha: f64, k: usize) -> Result<f64> {
    let table = if (alpha - 0.05).abs() < 1e-12 {
        &Q_005
    } else if (alpha - 0.10).abs() < 1e-12 {
        &Q_010
    } else {
        return Err(Error::InvalidArgument(format!("no Nemenyi table for alpha {alpha}; use 0.05 or 0.1")));
    };
    if !(2..=10).contains(&k) {
        return Err(Error::InvalidArgument(format!("Nemenyi table covers 2..=10 methods, got {k}")));
    }
    Ok(table[k - 2])
}

/// `q * sqrt(k (k + 1) / (6 N))`.
pub fn critical_difference(q: f64, k: usize, n: usize) -> f64 {
    q * ((k * (k + 1)) as f64 / (6.0 * n as f64)).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdResult {
    pub methods: Vec<String>,
    /// Mean rank per method (1 = best).
    pub average_ranks: Vec<f64>,
    pub n_datasets: usize,
    pub alpha: f64,
    pub critical_difference: f64,
    /// `None` when the matrix is constant and the test is undefined.
    pub friedman_chi2: Option<f64>,
    pub friedman_p: Option<f64>,
    /// Iman-Davenport refinement; `None` when undefined.
    pub iman_davenport_f: Option<f64>,
    pub iman_davenport_p: Option<f64>,
    pub flagged: bool,
}

/// `scores[dataset][method]`, higher is better.
pub fn friedman_nemenyi(methods: &[String], scores: &[Vec<f64>], alpha: f64) -> Result<CdResult> {
    let k = methods.len();
    let n = scores.len();
    if k < 2 || n < 3 {
        return Err(Error::InvalidArgument("Friedman test needs >= 2 methods and >= 3 datasets".into()));
    }
    if scores.iter().any(|r| r.len() != k) {
        return Err(Error::InvalidArgument("ragged score matrix".into()));
    }
    let q = nemenyi_q(alpha, k)?;
    let mut avg = vec![0.0; k];
    for row in scores {
        for (a, r) in avg.iter_mut().zip(tie_averaged_ranks(row)) {
            *a += r;
        }
    }
    avg.iter_mut().for_each(|a| *a /= n as f64);

    let first = scores[0][0];
    let constant = scores.iter().flatten().all(|&v| v == first);
    let (kf, nf) = (k as f64, n as f64);
    let (chi2, p, f, fp) = if constant {
        (None, None, None, None)
    } else {
        let sum_sq: f64 = avg.iter().map(|r| r * r).sum();
        let chi2 = 12.0 * nf / (kf * (kf + 1.0)) * (sum_sq - kf * (kf + 1.0).powi(2) / 4.0);
        let chi2 = chi2.max(0.0);
        let p = 1.0 - ChiSquared::new(kf - 1.0).expect("df > 0").cdf(chi2);
        let denom = nf * (kf - 1.0) - chi2;
        let (f, fp) = if denom > 0.0 {
            let f = (nf - 1.0) * chi2 / denom;
            let dist = FisherSnedecor::new(kf - 1.0, (kf - 1.0) * (nf - 1.0)).expect("df > 0");
            (Some(f), Some(1.0 - dist.cdf(f)))
        } else {
            (None, None)
        };
        (Some(chi2), Some(p), f, fp)
    };
    Ok(CdResult {
        methods: methods.to_vec(),
        average_ranks: avg,
        n_datasets: n,
        alpha,
        critical_difference: critical_difference(q, k, n),
        friedman_chi2: chi2,
        friedman_p: p,
        iman_davenport_f: f,
        iman_davenport_p: fp,
        flagged: constant,
    })
}
