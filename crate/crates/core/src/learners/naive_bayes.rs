use serde::{Deserialize, Serialize};

use super::Predictor;
use crate::dataset::{ColumnValues, Dataset};

/// Lower bound on per-class Gaussian variances.
pub const VARIANCE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum FeatureModel {
    Gaussian { mean: Vec<f64>, var: Vec<f64> },
    /// `log_prob[class][level]`, Laplace-smoothed.
    Frequencies { log_prob: Vec<Vec<f64>> },
}

/// Gaussian / multinomial naive Bayes. Missing values drop out of the
/// likelihood product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayes {
    /// `None` for classes absent from the training rows.
    log_prior: Vec<Option<f64>>,
    features: Vec<FeatureModel>,
}

fn mean_var(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    Some((mean, var.max(VARIANCE_FLOOR)))
}

pub fn fit_naive_bayes(d: &Dataset, rows: &[usize]) -> Predictor {
    assert!(!rows.is_empty(), "naive Bayes needs at least one row");
    let k = d.n_classes();
    let counts = d.class_counts(rows);
    let n = rows.len() as f64;
    let log_prior = counts
        .iter()
        .map(|&c| (c > 0).then(|| (c as f64 / n).ln()))
        .collect();

    let features = d
        .columns
        .iter()
        .map(|col| match &col.values {
            ColumnValues::Numeric(v) => {
                let pooled: Vec<f64> = rows.iter().filter_map(|&r| v[r]).collect();
                let fallback = mean_var(&pooled).unwrap_or((0.0, 1.0));
                let (mean, var) = (0..k)
                    .map(|c| {
                        let vals: Vec<f64> = rows
                            .iter()
                            .filter(|&&r| d.target[r] == c)
                            .filter_map(|&r| v[r])
                            .collect();
                        mean_var(&vals).unwrap_or(fallback)
                    })
                    .unzip();
                FeatureModel::Gaussian { mean, var }
            }
            ColumnValues::Categorical { levels, codes } => {
                let l = levels.len();
                let mut freq = vec![vec![0usize; l]; k];
                for &r in rows {
                    if let Some(code) = codes[r] {
                        freq[d.target[r]][code as usize] += 1;
                    }
                }
                let log_prob = freq
                    .iter()
                    .map(|f| {
                        let total: usize = f.iter().sum();
                        f.iter()
                            .map(|&c| ((c as f64 + 1.0) / (total as f64 + l as f64)).ln())
                            .collect()
                    })
                    .collect();
                FeatureModel::Frequencies { log_prob }
            }
        })
        .collect();

    Predictor::NaiveBayes(NaiveBayes {
        log_prior,
        features,
    })
}

impl NaiveBayes {
    pub fn log_posteriors(&self, d: &Dataset, row: usize) -> Vec<Option<f64>> {
        let mut scores = self.log_prior.clone();
        for (model, col) in self.features.iter().zip(&d.columns) {
            match (model, &col.values) {
                (FeatureModel::Gaussian { mean, var }, ColumnValues::Numeric(v)) => {
                    if let Some(x) = v[row] {
                        for (c, s) in scores.iter_mut().enumerate() {
                            if let Some(s) = s {
                                *s += -0.5 * (2.0 * std::f64::consts::PI * var[c]).ln()
                                    - (x - mean[c]).powi(2) / (2.0 * var[c]);
                            }
                        }
                    }
                }
                (FeatureModel::Frequencies { log_prob }, ColumnValues::Categorical { codes, .. }) => {
                    if let Some(code) = codes[row] {
                        for (c, s) in scores.iter_mut().enumerate() {
                            if let (Some(s), Some(lp)) = (s, log_prob[c].get(code as usize)) {
                                *s += lp;
                            }
                        }
                    }
                }
                _ => panic!("naive Bayes applied to a dataset with a different schema"),
            }
        }
        scores
    }

    pub fn predict(&self, d: &Dataset, row: usize) -> usize {
        let scores = self.log_posteriors(d, row);
        let mut best: Option<(usize, f64)> = None;
        for (c, s) in scores.iter().enumerate() {
            if let Some(s) = *s {
                if best.is_none_or(|(_, b)| s > b) {
                    best = Some((c, s));
                }
            }
        }
        best.map(|(c, _)| c).expect("at least one class in training rows")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Column;
    use crate::learners::accuracy;
    use crate::synth::gaussian;

    #[test]
    fn separated_gaussians() {
        let mut rng = crate::seed::rng(11);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..100 {
            let (m, l) = if i < 50 { (-5.0, "neg") } else { (5.0, "pos") };
            rows.push(vec![gaussian(&mut rng, m, 0.5)]);
            labels.push(l);
        }
        let d = Dataset::from_rows("g", &rows, &labels).unwrap();
        let p = fit_naive_bayes(&d, &d.all_rows());
        assert!(accuracy(&p, &d, &d.all_rows()) >= 0.98);
    }

    #[test]
    fn uninformative_feature_gives_prior_argmax() {
        let d = Dataset::from_rows(
            "t",
            &[vec![1.0], vec![1.0], vec![1.0], vec![1.0], vec![1.0]],
            &["a", "b", "b", "b", "a"],
        )
        .unwrap();
        let p = fit_naive_bayes(&d, &d.all_rows());
        assert!(p.predict_all(&d).iter().all(|&c| c == 1));
    }

    #[test]
    fn all_categorical() {
        let c1 = Column::categorical("c1", &[Some("x"), Some("x"), Some("y"), Some("y"), None]);
        let c2 = Column::categorical("c2", &[Some("u"), Some("v"), Some("u"), Some("v"), Some("u")]);
        let d = Dataset::new("t", vec![c1, c2], "y", &["p", "p", "q", "q", "q"]).unwrap();
        let p = fit_naive_bayes(&d, &d.all_rows());
        assert_eq!(p.predict(&d, 0), 0);
        assert_eq!(p.predict(&d, 2), 1);
        // missing c1: only c2 and the prior speak
        let _ = p.predict(&d, 4);
    }

    #[test]
    fn absent_class_is_never_predicted() {
        let d = Dataset::from_rows("t", &[vec![0.0], vec![1.0], vec![9.0]], &["a", "a", "b"]).unwrap();
        let p = fit_naive_bayes(&d, &[0, 1]);
        assert!(p.predict_all(&d).iter().all(|&c| c == 0));
    }
}
