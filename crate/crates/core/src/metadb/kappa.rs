/// Cohen's kappa between two label sequences. When chance agreement is
/// already 1 (both sides constant on the same class) the result is 1 for
/// perfect agreement and 0 otherwise.
pub fn cohen_kappa(truth: &[usize], pred: &[usize]) -> f64 {
    assert_eq!(truth.len(), pred.len(), "kappa needs equal-length inputs");
    assert!(!truth.is_empty(), "kappa needs at least one label");
    let k = truth.iter().chain(pred).copied().max().unwrap_or(0) + 1;
    let n = truth.len() as f64;
    let mut row = vec![0usize; k];
    let mut col = vec![0usize; k];
    let mut agree = 0usize;
    for (&t, &p) in truth.iter().zip(pred) {
        row[t] += 1;
        col[p] += 1;
        if t == p {
            agree += 1;
        }
    }
    let p_o = agree as f64 / n;
    let p_e: f64 = row.iter().zip(&col).map(|(&a, &b)| (a as f64 / n) * (b as f64 / n)).sum();
    if p_e >= 1.0 {
        return if agree == truth.len() { 1.0 } else { 0.0 };
    }
    (p_o - p_e) / (1.0 - p_e)
}
