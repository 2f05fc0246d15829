//! Base learners: the CART tree used inside bagging, and the landmarkers
//! (naive Bayes, depth-limited trees, majority class).

mod majority;
mod naive_bayes;
mod tree;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;

pub use majority::{fit_majority, MajorityClass};
pub use naive_bayes::{fit_naive_bayes, NaiveBayes, VARIANCE_FLOOR};
pub use tree::{fit_stump, fit_tree, DecisionTree, SplitRule, TreeNode, TreeParams};

/// A fitted classifier. Predictions are class indices into the training
/// dataset's `class_labels`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predictor {
    Tree(DecisionTree),
    NaiveBayes(NaiveBayes),
    Majority(MajorityClass),
}

impl Predictor {
    pub fn predict(&self, d: &Dataset, row: usize) -> usize {
        match self {
            Predictor::Tree(t) => t.predict(d, row),
            Predictor::NaiveBayes(nb) => nb.predict(d, row),
            Predictor::Majority(m) => m.class,
        }
    }

    pub fn predict_rows(&self, d: &Dataset, rows: &[usize]) -> Vec<usize> {
        rows.iter().map(|&r| self.predict(d, r)).collect()
    }

    pub fn predict_all(&self, d: &Dataset) -> Vec<usize> {
        (0..d.n()).map(|r| self.predict(d, r)).collect()
    }
}

/// Fraction of `rows` whose prediction matches the target.
pub fn accuracy(p: &Predictor, d: &Dataset, rows: &[usize]) -> f64 {
    if rows.is_empty() {
        return 0.0;
    }
    let hits = rows.iter().filter(|&&r| p.predict(d, r) == d.target[r]).count();
    hits as f64 / rows.len() as f64
}

/// Index of the largest count; ties go to the lowest index.
pub(crate) fn argmax_first<T: PartialOrd + Copy>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}
