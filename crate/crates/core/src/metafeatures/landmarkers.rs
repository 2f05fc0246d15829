//! Landmarkers: cheap learners whose cross-validated predictions and
//! accuracies characterize a dataset.

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, FoldAssignment};
use crate::learners::{fit_majority, fit_naive_bayes, fit_stump, Predictor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Landmarker {
    NaiveBayes,
    StumpD1,
    StumpD2,
    StumpD3,
    Majority,
}

impl Landmarker {
    pub const ALL: [Landmarker; 5] = [
        Landmarker::NaiveBayes,
        Landmarker::StumpD1,
        Landmarker::StumpD2,
        Landmarker::StumpD3,
        Landmarker::Majority,
    ];

    /// Metafeature name prefix, e.g. `dstump.landmarker_d1`.
    pub fn prefix(self) -> &'static str {
        match self {
            Landmarker::NaiveBayes => "naive_bayes.landmarker",
            Landmarker::StumpD1 => "dstump.landmarker_d1",
            Landmarker::StumpD2 => "dstump.landmarker_d2",
            Landmarker::StumpD3 => "dstump.landmarker_d3",
            Landmarker::Majority => "majority.landmarker",
        }
    }

    pub fn fit(self, d: &Dataset, rows: &[usize]) -> Predictor {
        match self {
            Landmarker::NaiveBayes => fit_naive_bayes(d, rows),
            Landmarker::StumpD1 => fit_stump(d, rows, 1),
            Landmarker::StumpD2 => fit_stump(d, rows, 2),
            Landmarker::StumpD3 => fit_stump(d, rows, 3),
            Landmarker::Majority => fit_majority(d, rows),
        }
    }
}

/// Out-of-fold predictions of every landmarker, aligned with the rows of
/// the dataset, and the matching cross-validated accuracies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandmarkerResults {
    pub predictions: Vec<Vec<usize>>,
    pub accuracies: Vec<f64>,
}

impl LandmarkerResults {
    pub fn predictions(&self, l: Landmarker) -> &[usize] {
        &self.predictions[l as usize]
    }

    pub fn accuracy(&self, l: Landmarker) -> f64 {
        self.accuracies[l as usize]
    }
}

pub fn compute_landmarkers(d: &Dataset, folds: &FoldAssignment) -> LandmarkerResults {
    let mut predictions = vec![vec![0usize; d.n()]; Landmarker::ALL.len()];
    for fold in folds.folds() {
        let train = folds.train_rows(fold);
        let test = folds.test_rows(fold);
        for l in Landmarker::ALL {
            let model = l.fit(d, &train);
            for &r in &test {
                predictions[l as usize][r] = model.predict(d, r);
            }
        }
    }
    let accuracies = predictions
        .iter()
        .map(|p| {
            let hits = p.iter().zip(&d.target).filter(|(a, b)| a == b).count();
            hits as f64 / d.n() as f64
        })
        .collect();
    LandmarkerResults { predictions, accuracies }
}
