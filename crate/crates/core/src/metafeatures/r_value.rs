//! R-value class overlap on the encoded dataset.

use crate::dataset::{encode, Dataset};

/// For every ordered class pair `(i, j)` with both classes present: the
/// fraction of class-`i` instances with more than `theta` of their `k`
/// nearest neighbors (among classes `i` and `j`, self excluded) in class `j`.
/// Equal distances rank same-class neighbors first, which keeps the result
/// independent of row order.
pub fn r_values(d: &Dataset, k: usize, theta: usize) -> Vec<f64> {
    assert!(k >= 1, "r-value needs k >= 1");
    let view = encode(d, &d.all_rows());
    let n = d.n();
    let n_classes = d.n_classes();
    let by_class: Vec<Vec<usize>> = (0..n_classes)
        .map(|c| (0..n).filter(|&r| d.target[r] == c).collect())
        .collect();
    let dist = |a: usize, b: usize| -> f64 {
        view.row(a)
            .iter()
            .zip(view.row(b))
            .map(|(x, y)| (x - y) * (x - y))
            .sum()
    };

    // overlapping[i][j] = instances of class i overlapping with class j
    let mut overlapping = vec![vec![0usize; n_classes]; n_classes];
    for (ci, members) in by_class.iter().enumerate() {
        for &a in members {
            let to_all: Vec<f64> = (0..n).map(|b| dist(a, b)).collect();
            let own: Vec<f64> = members.iter().filter(|&&b| b != a).map(|&b| to_all[b]).collect();
            for (cj, others) in by_class.iter().enumerate() {
                if cj == ci || others.is_empty() {
                    continue;
                }
                // (distance, 0 for same class / 1 for the other class)
                let mut cand: Vec<(f64, u8)> = own.iter().map(|&x| (x, 0)).collect();
                cand.extend(others.iter().map(|&b| (to_all[b], 1)));
                let kk = k.min(cand.len());
                let cmp = |p: &(f64, u8), q: &(f64, u8)| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1));
                if kk < cand.len() {
                    cand.select_nth_unstable_by(kk - 1, cmp);
                }
                let foreign = cand[..kk].iter().filter(|c| c.1 == 1).count();
                if foreign > theta {
                    overlapping[ci][cj] += 1;
                }
            }
        }
    }

    let mut out = Vec::new();
    for ci in 0..n_classes {
        for cj in 0..n_classes {
            if ci != cj && !by_class[ci].is_empty() && !by_class[cj].is_empty() {
                out.push(overlapping[ci][cj] as f64 / by_class[ci].len() as f64);
            }
        }
    }
    out
}
