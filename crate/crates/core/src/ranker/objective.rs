//! Pairwise logistic (RankNet) objective within one group.

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Gradient and hessian of the summed pairwise loss `ln(1 + e^-(s_i - s_j))`
/// over pairs with `labels[i] > labels[j]`, added into `g` and `h`.
pub fn accumulate_pairwise(scores: &[f64], labels: &[f64], g: &mut [f64], h: &mut [f64]) {
    let n = scores.len();
    for i in 0..n {
        for j in 0..n {
            if labels[i] > labels[j] {
                let s = scores[i] - scores[j];
                let lambda = -sigmoid(-s);
                let rho = sigmoid(s) * sigmoid(-s);
                g[i] += lambda;
                g[j] -= lambda;
                h[i] += rho;
                h[j] += rho;
            }
        }
    }
}

/// Per-example `(g, h)` for one group.
pub fn pairwise_gradients(scores: &[f64], labels: &[f64]) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(scores.len(), labels.len());
    let mut g = vec![0.0; scores.len()];
    let mut h = vec![0.0; scores.len()];
    accumulate_pairwise(scores, labels, &mut g, &mut h);
    (g, h)
}

/// Summed pairwise logistic loss of one group.
pub fn pairwise_loss(scores: &[f64], labels: &[f64]) -> f64 {
    let mut loss = 0.0;
    for i in 0..scores.len() {
        for j in 0..scores.len() {
            if labels[i] > labels[j] {
                loss += softplus(-(scores[i] - scores[j]));
            }
        }
    }
    loss
}
