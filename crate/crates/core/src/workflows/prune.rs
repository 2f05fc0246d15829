//! Ordered ensemble pruning. Both methods return a full greedy ordering of
//! the candidate models; keeping the first `keep` entries prunes the
//! ensemble, and smaller prunings are prefixes of larger ones.

use serde::{Deserialize, Serialize};

/// Class predictions of every model on every pool instance, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionTable {
    pub n_rows: usize,
    pub n_models: usize,
    data: Vec<u32>,
}

impl PredictionTable {
    pub fn new(n_rows: usize, n_models: usize) -> Self {
        PredictionTable {
            n_rows,
            n_models,
            data: vec![0; n_rows * n_models],
        }
    }

    /// Builds a table from `rows[i][m]`.
    pub fn from_rows(rows: &[Vec<usize>]) -> Self {
        let n_models = rows.first().map_or(0, Vec::len);
        let mut t = PredictionTable::new(rows.len(), n_models);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n_models, "ragged prediction rows");
            for (m, &c) in r.iter().enumerate() {
                t.set(i, m, c);
            }
        }
        t
    }

    pub fn get(&self, row: usize, model: usize) -> usize {
        self.data[row * self.n_models + model] as usize
    }

    pub fn set(&mut self, row: usize, model: usize, class: usize) {
        self.data[row * self.n_models + model] = class as u32;
    }

    pub fn row(&self, row: usize) -> &[u32] {
        &self.data[row * self.n_models..(row + 1) * self.n_models]
    }

    /// Keeps only the listed model columns, in the listed order.
    pub fn select_models(&self, models: &[usize]) -> PredictionTable {
        let mut t = PredictionTable::new(self.n_rows, models.len());
        for i in 0..self.n_rows {
            for (j, &m) in models.iter().enumerate() {
                t.set(i, j, self.get(i, m));
            }
        }
        t
    }
}

/// `+1` where a model classifies a pool instance correctly, `-1` otherwise.
/// Stored per model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignatureMatrix {
    pub n_instances: usize,
    pub n_models: usize,
    data: Vec<i8>,
}

impl SignatureMatrix {
    /// Signatures of the first `n_models` columns of `table`.
    pub fn from_predictions(table: &PredictionTable, labels: &[usize], n_models: usize) -> Self {
        assert_eq!(table.n_rows, labels.len());
        assert!(n_models <= table.n_models);
        let n = labels.len();
        let mut data = vec![0i8; n * n_models];
        for m in 0..n_models {
            for (i, &y) in labels.iter().enumerate() {
                data[m * n + i] = if table.get(i, m) == y { 1 } else { -1 };
            }
        }
        SignatureMatrix {
            n_instances: n,
            n_models,
            data,
        }
    }

    /// Builds a matrix directly from per-model signature columns.
    pub fn from_columns(columns: &[Vec<i8>]) -> Self {
        let n = columns.first().map_or(0, Vec::len);
        assert!(columns.iter().all(|c| c.len() == n && c.iter().all(|&v| v == 1 || v == -1)));
        SignatureMatrix {
            n_instances: n,
            n_models: columns.len(),
            data: columns.concat(),
        }
    }

    pub fn column(&self, model: usize) -> &[i8] {
        &self.data[model * self.n_instances..(model + 1) * self.n_instances]
    }
}

/// Margin distance minimization: greedily add the model that brings the mean
/// signature vector of the selection closest to `(p, ..., p)`.
pub fn mdsq_order(sig: &SignatureMatrix, p: f64) -> Vec<usize> {
    let n = sig.n_instances;
    let mut sum = vec![0.0f64; n];
    let mut selected = vec![false; sig.n_models];
    let mut order = Vec::with_capacity(sig.n_models);
    for step in 1..=sig.n_models {
        let u = step as f64;
        let mut best: Option<(usize, f64)> = None;
        for m in (0..sig.n_models).filter(|&m| !selected[m]) {
            let dist: f64 = sig
                .column(m)
                .iter()
                .zip(&sum)
                .map(|(&c, &s)| {
                    let diff = (s + f64::from(c)) / u - p;
                    diff * diff
                })
                .sum();
            if best.is_none_or(|(_, b)| dist < b) {
                best = Some((m, dist));
            }
        }
        let (m, _) = best.expect("unselected model remains");
        selected[m] = true;
        for (s, &c) in sum.iter_mut().zip(sig.column(m)) {
            *s += f64::from(c);
        }
        order.push(m);
    }
    order
}

/// First `keep` models of the MDSQ ordering.
pub fn prune_mdsq(sig: &SignatureMatrix, keep: usize, p: f64) -> Vec<usize> {
    assert!(keep >= 1 && keep <= sig.n_models, "keep out of range");
    let mut order = mdsq_order(sig, p);
    order.truncate(keep);
    order
}

const BB_EPS_CLAMP: f64 = 1e-6;

/// Boosting-based reordering: AdaBoost weight updates over the pool with
/// already-fitted models, picking the lowest weighted error each round.
/// Weights reset to uniform when every remaining model has error >= 0.5.
pub fn bb_order(labels: &[usize], table: &PredictionTable, n_models: usize) -> Vec<usize> {
    let n = labels.len();
    assert_eq!(table.n_rows, n);
    let uniform = 1.0 / n as f64;
    let mut w = vec![uniform; n];
    let mut selected = vec![false; n_models];
    let mut order = Vec::with_capacity(n_models);

    let weighted_errors = |w: &[f64], selected: &[bool]| -> Vec<(usize, f64)> {
        (0..n_models)
            .filter(|&m| !selected[m])
            .map(|m| {
                let err = (0..n)
                    .filter(|&i| table.get(i, m) != labels[i])
                    .map(|i| w[i])
                    .sum::<f64>();
                (m, err)
            })
            .collect()
    };
    let argmin = |errs: &[(usize, f64)]| -> (usize, f64) {
        let mut best = errs[0];
        for &(m, e) in &errs[1..] {
            if e < best.1 {
                best = (m, e);
            }
        }
        best
    };

    for _ in 0..n_models {
        let mut errs = weighted_errors(&w, &selected);
        if errs.iter().all(|&(_, e)| e >= 0.5) {
            w.iter_mut().for_each(|x| *x = uniform);
            errs = weighted_errors(&w, &selected);
        }
        let (m, eps) = argmin(&errs);
        selected[m] = true;
        order.push(m);

        let e = eps.clamp(BB_EPS_CLAMP, 1.0 - BB_EPS_CLAMP);
        let alpha = 0.5 * ((1.0 - e) / e).ln();
        let (up, down) = (alpha.exp(), (-alpha).exp());
        for (i, wi) in w.iter_mut().enumerate() {
            *wi *= if table.get(i, m) == labels[i] { down } else { up };
        }
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= total);
    }
    order
}

pub fn prune_bb(labels: &[usize], table: &PredictionTable, keep: usize) -> Vec<usize> {
    assert!(keep >= 1 && keep <= table.n_models, "keep out of range");
    let mut order = bb_order(labels, table, table.n_models);
    order.truncate(keep);
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mdsq_prefers_all_correct_model() {
        // 3 models, 4 instances; distance from the single-model mean to 0.075·1
        // is 4·(1-0.075)^2 = 3.4225 for the all-correct model, 4·(1.075)^2 = 4.6225 otherwise
        let sig = SignatureMatrix::from_columns(&[vec![-1; 4], vec![1; 4], vec![-1; 4]]);
        assert_eq!(prune_mdsq(&sig, 1, 0.075), vec![1]);
    }

    #[test]
    fn mdsq_full_keep_is_a_permutation_and_ties_pick_lower_index() {
        let sig = SignatureMatrix::from_columns(&[
            vec![1, -1, 1, -1],
            vec![1, -1, 1, -1],
            vec![-1, 1, 1, 1],
        ]);
        let order = prune_mdsq(&sig, 3, 0.075);
        let mut sorted = order.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2]);
        let pos = |m| order.iter().position(|&x| x == m).unwrap();
        assert!(pos(0) < pos(1));
    }

    #[test]
    fn bb_zero_error_model_first() {
        let labels = vec![0, 1, 0, 1];
        let table = PredictionTable::from_rows(&[vec![1, 0, 0], vec![1, 1, 0], vec![0, 0, 1], vec![0, 1, 1]]);
        assert_eq!(prune_bb(&labels, &table, 1), vec![1]);
    }

    #[test]
    fn bb_weight_reset_hand_run() {
        // m0 correct on {0,1,2}; m1 never correct; m2 correct on {0,1}.
        // Round 1 (uniform): errors .25/1/.5 -> m0. eps=.25, alpha=ln(3)/2, so
        // correct rows are scaled by 1/sqrt(3), instance 3 by sqrt(3); after
        // normalizing, w = (1/6,1/6,1/6,1/2).
        // Round 2: m1 error 1, m2 error 1/6+1/2 = 2/3, all >= .5 -> reset;
        // uniform errors 1 (m1) and .5 (m2) -> m2. Round 3 takes m1.
        let labels = vec![0, 0, 0, 0];
        let table = PredictionTable::from_rows(&[vec![0, 1, 0], vec![0, 1, 0], vec![0, 1, 1], vec![1, 1, 1]]);
        assert_eq!(bb_order(&labels, &table, 3), vec![0, 2, 1]);
    }

    #[test]
    fn bb_two_complementary_models_selected_first() {
        // m0 right on {0,1}, m1 right on {2,3}, m2 right on {0} only.
        // Round 1: errors .5/.5/.75 all >= .5 -> reset (already uniform) -> m0 (lowest index).
        // eps=.5 gives alpha=0, weights stay uniform. Round 2: m1 .5 < m2 .75 -> m1.
        let labels = vec![0, 0, 0, 0];
        let table = PredictionTable::from_rows(&[vec![0, 1, 0], vec![0, 1, 1], vec![1, 0, 1], vec![1, 0, 1]]);
        let order = prune_bb(&labels, &table, 2);
        assert_eq!(order, vec![0, 1]);
    }

    #[test]
    fn prefix_property() {
        let labels: Vec<usize> = (0..9).map(|i| i % 2).collect();
        let rows: Vec<Vec<usize>> = (0..9)
            .map(|i| (0..6).map(|m| (i * 7 + m * 3 + i * m) % 5 % 2).collect())
            .collect();
        let table = PredictionTable::from_rows(&rows);
        let sig = SignatureMatrix::from_predictions(&table, &labels, 6);
        for keep in 1..6 {
            let a = prune_bb(&labels, &table, keep);
            let b = prune_bb(&labels, &table, keep + 1);
            assert_eq!(a[..], b[..keep]);
            let a = prune_mdsq(&sig, keep, 0.075);
            let b = prune_mdsq(&sig, keep + 1, 0.075);
            assert_eq!(a[..], b[..keep]);
        }
    }
}
