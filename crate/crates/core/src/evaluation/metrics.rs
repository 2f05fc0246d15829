//! Ranking metrics against a ground truth given by per-workflow kappas.

use std::collections::BTreeMap;

/// Workflows whose ground-truth position is within the top `top`: fewer than
/// `top` workflows are strictly better, so ties at the boundary are all in.
pub fn relevant_set(kappas: &BTreeMap<String, f64>, top: usize) -> Vec<String> {
    kappas
        .iter()
        .filter(|(_, &k)| kappas.values().filter(|&&o| o > k).count() < top)
        .map(|(w, _)| w.clone())
        .collect()
}

/// Average precision of the first `k` predicted items against `relevant`.
pub fn average_precision_at_k(predicted: &[String], relevant: &[String], k: usize) -> f64 {
    let denom = relevant.len().min(k);
    if denom == 0 {
        return 0.0;
    }
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (i, item) in predicted.iter().take(k).enumerate() {
        if relevant.contains(item) {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    sum / denom as f64
}

/// AP@k with the relevant set taken as the ground-truth top `k`.
pub fn map_at_k(predicted: &[String], kappas: &BTreeMap<String, f64>, k: usize) -> f64 {
    average_precision_at_k(predicted, &relevant_set(kappas, k), k)
}

/// Loss after testing the first `n` workflows of `ranking`, for every `n`:
/// best kappa overall minus best kappa among the prefix.
pub fn loss_curve(ranking: &[String], kappas: &BTreeMap<String, f64>) -> Vec<f64> {
    let best = kappas.values().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut seen = f64::NEG_INFINITY;
    ranking
        .iter()
        .map(|w| {
            seen = seen.max(kappas[w]);
            best - seen
        })
        .collect()
}

/// Best kappa among the first `n` workflows of `ranking`.
pub fn best_at_n(ranking: &[String], kappas: &BTreeMap<String, f64>, n: usize) -> f64 {
    assert!(n >= 1 && n <= ranking.len(), "n out of range");
    ranking[..n]
        .iter()
        .map(|w| kappas[w])
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Kendall's tau-b between two score lists.
pub fn kendall_tau(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let (mut concordant, mut discordant, mut ties_a, mut ties_b) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let da = (a[i] - a[j]).signum() as i64 * i64::from(a[i] != a[j]);
            let db = (b[i] - b[j]).signum() as i64 * i64::from(b[i] != b[j]);
            match (da, db) {
                (0, 0) => {}
                (0, _) => ties_a += 1,
                (_, 0) => ties_b += 1,
                _ if da == db => concordant += 1,
                _ => discordant += 1,
            }
        }
    }
    let n1 = (concordant + discordant + ties_a) as f64;
    let n2 = (concordant + discordant + ties_b) as f64;
    if n1 == 0.0 || n2 == 0.0 {
        return 0.0;
    }
    (concordant - discordant) as f64 / (n1 * n2).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("w{i:02}")).collect()
    }

    fn kappas(v: &[f64]) -> BTreeMap<String, f64> {
        ids(v.len()).into_iter().zip(v.iter().copied()).collect()
    }

    #[test]
    fn ap_examples() {
        let rel = ids(10);
        let mut pred: Vec<String> = ids(10);
        pred.reverse();
        assert_eq!(average_precision_at_k(&pred, &rel, 10), 1.0);
        let other: Vec<String> = (20..30).map(|i| format!("w{i:02}")).collect();
        assert_eq!(average_precision_at_k(&other, &rel, 10), 0.0);
        let mut p = other.clone();
        p[0] = rel[0].clone();
        p[2] = rel[1].clone();
        let ap = average_precision_at_k(&p, &rel, 10);
        assert!((ap - (1.0 + 2.0 / 3.0) / 10.0).abs() < 1e-12);
    }

    #[test]
    fn relevant_set_includes_boundary_ties() {
        let k = kappas(&[0.9, 0.8, 0.8, 0.1]);
        assert_eq!(relevant_set(&k, 2).len(), 3);
        assert_eq!(relevant_set(&k, 1), vec!["w00"]);
    }

    #[test]
    fn loss_curve_examples() {
        let k = kappas(&[0.9, 0.5, 0.1]);
        let worst_first: Vec<String> = vec!["w02".into(), "w01".into(), "w00".into()];
        let l = loss_curve(&worst_first, &k);
        assert!((l[0] - 0.8).abs() < 1e-12 && (l[1] - 0.4).abs() < 1e-12 && l[2] == 0.0);
        assert_eq!(loss_curve(&ids(3), &k)[0], 0.0);
        assert_eq!(best_at_n(&worst_first, &k, 1), 0.1);
        assert_eq!(best_at_n(&worst_first, &k, 3), 0.9);
    }

    #[test]
    fn kendall_examples() {
        assert_eq!(kendall_tau(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]), 1.0);
        assert_eq!(kendall_tau(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]), -1.0);
    }
}
