use serde::{Deserialize, Serialize};

use super::{ColumnValues, Dataset};

/// Where an encoded column comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedColumn {
    pub source: usize,
    /// Category level for one-hot columns; `None` for standardized numerics.
    pub level: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum ColumnCoding {
    Standardize { mean: f64, sd: f64 },
    OneHot { levels: usize },
}

/// Standardization and one-hot statistics fitted on a set of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Encoder {
    codings: Vec<ColumnCoding>,
    provenance: Vec<EncodedColumn>,
}

/// Dense row-major real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedView {
    pub n_rows: usize,
    pub n_cols: usize,
    pub data: Vec<f64>,
    pub provenance: Vec<EncodedColumn>,
}

impl EncodedView {
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.n_cols..(r + 1) * self.n_cols]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.n_cols + c]
    }
}

impl Encoder {
    /// Fits column statistics on `fit_rows` (population standard deviation).
    pub fn fit(d: &Dataset, fit_rows: &[usize]) -> Encoder {
        assert!(!fit_rows.is_empty(), "encoder needs at least one fit row");
        let mut codings = Vec::with_capacity(d.n_features());
        let mut provenance = Vec::new();
        for (j, col) in d.columns.iter().enumerate() {
            match &col.values {
                ColumnValues::Numeric(v) => {
                    let vals: Vec<f64> = fit_rows.iter().filter_map(|&r| v[r]).collect();
                    let (mean, sd) = if vals.is_empty() {
                        (0.0, 0.0)
                    } else {
                        let n = vals.len() as f64;
                        let mean = vals.iter().sum::<f64>() / n;
                        let var = vals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
                        (mean, var.sqrt())
                    };
                    codings.push(ColumnCoding::Standardize { mean, sd });
                    provenance.push(EncodedColumn {
                        source: j,
                        level: None,
                    });
                }
                ColumnValues::Categorical { levels, .. } => {
                    codings.push(ColumnCoding::OneHot {
                        levels: levels.len(),
                    });
                    provenance.extend(levels.iter().map(|l| EncodedColumn {
                        source: j,
                        level: Some(l.clone()),
                    }));
                }
            }
        }
        Encoder {
            codings,
            provenance,
        }
    }

    pub fn width(&self) -> usize {
        self.provenance.len()
    }

    /// Encodes one row into `out` (cleared first).
    pub fn encode_row(&self, d: &Dataset, r: usize, out: &mut Vec<f64>) {
        out.clear();
        for (coding, col) in self.codings.iter().zip(&d.columns) {
            match (coding, &col.values) {
                (ColumnCoding::Standardize { mean, sd }, ColumnValues::Numeric(v)) => {
                    out.push(match v[r] {
                        Some(x) if *sd > 0.0 => (x - mean) / sd,
                        _ => 0.0,
                    });
                }
                (ColumnCoding::OneHot { levels }, ColumnValues::Categorical { codes, .. }) => {
                    let start = out.len();
                    out.resize(start + levels, 0.0);
                    if let Some(k) = codes[r] {
                        if (k as usize) < *levels {
                            out[start + k as usize] = 1.0;
                        }
                    }
                }
                _ => panic!("encoder applied to a dataset with a different schema"),
            }
        }
    }

    pub fn transform(&self, d: &Dataset, rows: &[usize]) -> EncodedView {
        let n_cols = self.width();
        let mut data = Vec::with_capacity(rows.len() * n_cols);
        let mut buf = Vec::with_capacity(n_cols);
        for &r in rows {
            self.encode_row(d, r, &mut buf);
            data.extend_from_slice(&buf);
        }
        EncodedView {
            n_rows: rows.len(),
            n_cols,
            data,
            provenance: self.provenance.clone(),
        }
    }
}

/// Encodes every row of `d` with statistics fitted on `fit_rows`.
pub fn encode(d: &Dataset, fit_rows: &[usize]) -> EncodedView {
    Encoder::fit(d, fit_rows).transform(d, &d.all_rows())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Column;

    #[test]
    fn standardizes_with_population_sd() {
        let d = Dataset::from_rows("t", &[vec![1.0], vec![2.0], vec![3.0]], &["a", "b", "a"]).unwrap();
        let v = encode(&d, &d.all_rows());
        let expected = [-1.224_744_871_391_589, 0.0, 1.224_744_871_391_589];
        for (r, e) in expected.iter().enumerate() {
            assert!((v.get(r, 0) - e).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_column_maps_to_zero() {
        let d = Dataset::from_rows("t", &[vec![4.0], vec![4.0]], &["a", "b"]).unwrap();
        let v = encode(&d, &d.all_rows());
        assert_eq!(v.data, vec![0.0, 0.0]);
    }

    #[test]
    fn one_hot_blocks() {
        let col = Column::categorical("c", &[Some("a"), Some("b"), None, Some("a")]);
        let d = Dataset::new("t", vec![col], "y", &["p", "q", "p", "q"]).unwrap();
        let v = encode(&d, &d.all_rows());
        assert_eq!(v.n_cols, 2);
        for r in [0, 1, 3] {
            assert_eq!(v.row(r).iter().sum::<f64>(), 1.0);
        }
        assert_eq!(v.row(2), &[0.0, 0.0]);
    }

    #[test]
    fn statistics_come_from_fit_rows_only() {
        let d = Dataset::from_rows(
            "t",
            &[vec![0.0], vec![2.0], vec![100.0]],
            &["a", "b", "a"],
        )
        .unwrap();
        let v = encode(&d, &[0, 1]);
        assert_eq!(v.get(0, 0), -1.0);
        assert_eq!(v.get(1, 0), 1.0);
        assert_eq!(v.get(2, 0), 99.0);
    }

    #[test]
    fn missing_numeric_encodes_as_zero() {
        let col = Column::numeric("x", vec![Some(1.0), None, Some(3.0)]);
        let d = Dataset::new("t", vec![col], "y", &["p", "q", "p"]).unwrap();
        let v = encode(&d, &d.all_rows());
        assert_eq!(v.get(1, 0), 0.0);
        assert_eq!(v.get(0, 0), -1.0);
    }
}
