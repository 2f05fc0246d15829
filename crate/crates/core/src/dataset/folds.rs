use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};
use crate::seed;

/// Assignment of every instance to one of `k` folds (numbered `1..=k`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub dataset_id: String,
    pub k: usize,
    pub assignment: Vec<usize>,
    pub seed: u64,
}

impl FoldAssignment {
    /// Rows whose fold is `fold` (1-based).
    pub fn test_rows(&self, fold: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, &f)| f == fold)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn train_rows(&self, fold: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, &f)| f != fold)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn folds(&self) -> impl Iterator<Item = usize> {
        1..=self.k
    }
}

/// Stratified k-fold split.
///
/// Instances of each class are put in a content-derived canonical order,
/// shuffled with a per-class seed and dealt round-robin; the dealing position
/// carries over between classes so fold sizes stay balanced too. Because the
/// canonical order depends only on row content, permuting the rows of a
/// dataset permutes the assignment along with them.
pub fn stratified_folds(d: &Dataset, k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("fold count {k} < 2")));
    }
    if k > d.n() {
        return Err(Error::InvalidArgument(format!(
            "fold count {k} exceeds instance count {}",
            d.n()
        )));
    }
    let keys: Vec<u64> = (0..d.n()).map(|r| d.row_key(r)).collect();
    let mut assignment = vec![0; d.n()];
    let mut next = 0usize;
    for class in 0..d.n_classes() {
        let mut members: Vec<usize> = (0..d.n()).filter(|&r| d.target[r] == class).collect();
        members.sort_by_key(|&r| keys[r]);
        let mut rng = seed::rng(seed::derive(seed, class as u64));
        members.shuffle(&mut rng);
        for r in members {
            assignment[r] = next % k + 1;
            next += 1;
        }
    }
    Ok(FoldAssignment {
        dataset_id: d.id.clone(),
        k,
        assignment,
        seed,
    })
}

/// `n` indices drawn uniformly with replacement from `0..n`.
pub fn bootstrap_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = seed::rng(seed);
    (0..n).map(|_| rng.gen_range(0..n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labelled(counts: &[usize]) -> Dataset {
        let mut labels = Vec::new();
        let mut rows = Vec::new();
        for (c, &n) in counts.iter().enumerate() {
            for i in 0..n {
                labels.push(format!("c{c}"));
                rows.push(vec![i as f64, c as f64]);
            }
        }
        Dataset::from_rows("t", &rows, &labels).unwrap()
    }

    fn per_class_fold_counts(d: &Dataset, f: &FoldAssignment) -> Vec<Vec<usize>> {
        let mut counts = vec![vec![0; f.k]; d.n_classes()];
        for (r, &fold) in f.assignment.iter().enumerate() {
            counts[d.target[r]][fold - 1] += 1;
        }
        counts
    }

    #[test]
    fn exact_divisibility() {
        let d = labelled(&[4, 4]);
        let f = stratified_folds(&d, 4, 1).unwrap();
        for row in per_class_fold_counts(&d, &f) {
            assert_eq!(row, vec![1, 1, 1, 1]);
        }
    }

    #[test]
    fn imbalanced_classes_stay_within_one() {
        let d = labelled(&[7, 3]);
        let f = stratified_folds(&d, 4, 9).unwrap();
        for row in per_class_fold_counts(&d, &f) {
            let max = row.iter().max().unwrap();
            let min = row.iter().min().unwrap();
            assert!(max - min <= 1, "{row:?}");
        }
        assert!(f.assignment.iter().all(|&x| (1..=4).contains(&x)));
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let d = labelled(&[20, 13, 9]);
        assert_eq!(stratified_folds(&d, 4, 3).unwrap(), stratified_folds(&d, 4, 3).unwrap());
        assert_ne!(
            stratified_folds(&d, 4, 3).unwrap().assignment,
            stratified_folds(&d, 4, 4).unwrap().assignment
        );
    }

    #[test]
    fn fold_count_errors() {
        let d = labelled(&[2, 1]);
        assert!(stratified_folds(&d, 4, 0).is_err());
        assert!(stratified_folds(&d, 1, 0).is_err());
    }

    #[test]
    fn bootstrap_basics() {
        assert_eq!(bootstrap_indices(1, 5), vec![0]);
        let a = bootstrap_indices(1000, 1);
        assert_eq!(a, bootstrap_indices(1000, 1));
        assert_ne!(a, bootstrap_indices(1000, 2));
        let mut seen = vec![false; 1000];
        for &i in &a {
            seen[i] = true;
        }
        let frac = seen.iter().filter(|&&s| s).count() as f64 / 1000.0;
        let expected = 1.0 - (-1.0f64).exp();
        assert!((frac - expected).abs() <= 0.05, "{frac}");
    }

    #[test]
    fn permuting_rows_permutes_assignment() {
        let d = labelled(&[11, 6]);
        let perm: Vec<usize> = (0..d.n()).rev().collect();
        let p = d.select_rows(&perm);
        let fa = stratified_folds(&d, 4, 2).unwrap();
        let fb = stratified_folds(&p, 4, 2).unwrap();
        for (new_row, &old_row) in perm.iter().enumerate() {
            assert_eq!(fb.assignment[new_row], fa.assignment[old_row]);
        }
    }
}
