//! Static voting and the two dynamic integration rules. They all work on a
//! selection pool described by its labels and a [`PredictionTable`] whose
//! columns are the ensemble members.

use super::prune::PredictionTable;

/// Plurality vote; ties go to the lowest class index.
pub fn plurality(labels: impl IntoIterator<Item = usize>, n_classes: usize) -> usize {
    let mut counts = vec![0usize; n_classes];
    for l in labels {
        counts[l] += 1;
    }
    let mut best = 0;
    for (c, &n) in counts.iter().enumerate() {
        if n > counts[best] {
            best = c;
        }
    }
    best
}

/// Indices of the `k` rows of `points` nearest to `query` (squared Euclidean),
/// nearest first; equal distances keep the lower row index first.
pub fn nearest_neighbors(points: &[f64], width: usize, query: &[f64], k: usize) -> Vec<usize> {
    assert_eq!(query.len(), width);
    let n = points.len().checked_div(width).unwrap_or(0);
    let mut dist: Vec<(f64, usize)> = (0..n)
        .map(|i| {
            let row = &points[i * width..(i + 1) * width];
            let d = row.iter().zip(query).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
            (d, i)
        })
        .collect();
    let k = k.min(n);
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < n && k > 0 {
        dist.select_nth_unstable_by(k - 1, cmp);
    }
    dist.truncate(k);
    dist.sort_by(cmp);
    dist.into_iter().map(|(_, i)| i).collect()
}

/// Overall local accuracy: position (in the member list) of the model that
/// is right on most of the `neighbors`; ties go to the lower position.
pub fn ola_select(neighbors: &[usize], pool_labels: &[usize], table: &PredictionTable) -> usize {
    let mut best = (0, 0usize);
    for m in 0..table.n_models {
        let hits = neighbors
            .iter()
            .filter(|&&i| table.get(i, m) == pool_labels[i])
            .count();
        if m == 0 || hits > best.1 {
            best = (m, hits);
        }
    }
    best.0
}

/// KNORA-Eliminate: members right on all of the nearest `k` neighbors,
/// shrinking `k` until some member qualifies; all members when none does.
/// `neighbors` must be sorted nearest first. Never returns an empty set.
pub fn knora_e_select(neighbors: &[usize], pool_labels: &[usize], table: &PredictionTable) -> Vec<usize> {
    for k in (1..=neighbors.len()).rev() {
        let region = &neighbors[..k];
        let oracles: Vec<usize> = (0..table.n_models)
            .filter(|&m| region.iter().all(|&i| table.get(i, m) == pool_labels[i]))
            .collect();
        if !oracles.is_empty() {
            return oracles;
        }
    }
    (0..table.n_models).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plurality_and_ties() {
        assert_eq!(plurality([0, 0, 1], 2), 0);
        assert_eq!(plurality([1, 0], 2), 0);
        assert_eq!(plurality([2, 2, 1], 3), 2);
    }

    #[test]
    fn neighbors_sorted_with_index_ties() {
        let points = [0.0, 3.0, 1.0, -1.0, 2.0];
        assert_eq!(nearest_neighbors(&points, 1, &[0.0], 3), vec![0, 2, 3]);
        assert_eq!(nearest_neighbors(&points, 1, &[0.0], 10).len(), 5);
    }

    /// Two regions on a line: x < 5 (pool 0..5) where model 1 is perfect and
    /// model 0 is always wrong, x >= 5 (pool 5..10) where model 0 is perfect.
    fn two_region_toy() -> (Vec<f64>, Vec<usize>, PredictionTable) {
        let points: Vec<f64> = (0..10).map(f64::from).collect();
        let labels: Vec<usize> = (0..10).map(|i| i % 2).collect();
        let rows: Vec<Vec<usize>> = (0..10)
            .map(|i| {
                let y = i % 2;
                if i < 5 {
                    vec![1 - y, y]
                } else {
                    vec![y, 1 - y]
                }
            })
            .collect();
        (points, labels, PredictionTable::from_rows(&rows))
    }

    #[test]
    fn ola_picks_locally_perfect_model() {
        let (points, labels, table) = two_region_toy();
        let nn = nearest_neighbors(&points, 1, &[1.2], 3);
        assert_eq!(nn, vec![1, 2, 0]);
        assert_eq!(ola_select(&nn, &labels, &table), 1);
        let nn = nearest_neighbors(&points, 1, &[8.0], 3);
        assert_eq!(ola_select(&nn, &labels, &table), 0);
    }

    #[test]
    fn ola_whole_pool_uses_best_global_model_and_ties_go_low() {
        let labels = vec![0, 0, 0, 0];
        let table = PredictionTable::from_rows(&[vec![1, 0], vec![0, 0], vec![0, 0], vec![0, 1]]);
        assert_eq!(ola_select(&[0, 1, 2, 3], &labels, &table), 0);
        let table = PredictionTable::from_rows(&[vec![1, 0], vec![0, 0], vec![0, 0], vec![0, 0]]);
        assert_eq!(ola_select(&[0, 1, 2, 3], &labels, &table), 1);
    }

    #[test]
    fn knora_e_oracles_and_fallbacks() {
        // 3 models; neighbors 0 and 1. Models 0 and 2 right on both, model 1 wrong on 1.
        let labels = vec![0, 1, 0];
        let table = PredictionTable::from_rows(&[vec![0, 0, 0], vec![1, 0, 1], vec![1, 1, 1]]);
        assert_eq!(knora_e_select(&[0, 1], &labels, &table), vec![0, 2]);
        // nobody right on the nearest neighbor: the whole ensemble
        let table = PredictionTable::from_rows(&[vec![1, 1, 1], vec![1, 1, 1], vec![0, 0, 0]]);
        assert_eq!(knora_e_select(&[0, 1], &labels, &table), vec![0, 1, 2]);
        // shrink: all right on neighbor 2 (nearest) but only model 1 on neighbor 1
        let table = PredictionTable::from_rows(&[vec![1, 1, 1], vec![0, 1, 0], vec![0, 0, 0]]);
        assert_eq!(knora_e_select(&[2, 1, 0], &labels, &table), vec![1]);
    }
}
