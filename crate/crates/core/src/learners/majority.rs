use serde::{Deserialize, Serialize};

use super::{argmax_first, Predictor};
use crate::dataset::Dataset;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MajorityClass {
    pub class: usize,
}

/// Constant predictor of the modal class of `rows`; ties go to label order.
pub fn fit_majority(d: &Dataset, rows: &[usize]) -> Predictor {
    assert!(!rows.is_empty(), "majority class needs at least one row");
    Predictor::Majority(MajorityClass {
        class: argmax_first(&d.class_counts(rows)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::accuracy;

    fn d(labels: &[&str]) -> Dataset {
        let rows: Vec<Vec<f64>> = (0..labels.len()).map(|i| vec![i as f64]).collect();
        Dataset::from_rows("t", &rows, labels).unwrap()
    }

    #[test]
    fn mode_and_tie_rule() {
        let a = d(&["A", "A", "B"]);
        assert_eq!(fit_majority(&a, &a.all_rows()).predict_all(&a), vec![0, 0, 0]);
        let b = d(&["A", "B"]);
        assert_eq!(fit_majority(&b, &b.all_rows()).predict(&b, 1), 0);
    }

    #[test]
    fn training_accuracy_is_modal_frequency() {
        let x = d(&["A", "B", "B", "C", "B", "A", "B"]);
        let p = fit_majority(&x, &x.all_rows());
        assert_eq!(accuracy(&p, &x, &x.all_rows()), 4.0 / 7.0);
    }
}
