//! Tabular classification datasets.
//!
//! A [`Dataset`] holds typed feature columns with explicit missing entries
//! and a categorical target without missing values. Everything downstream
//! (trees, landmarkers, metafeatures, cross-validation) reads from it.

mod encode;
mod folds;
mod manifest;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

pub use encode::{encode, EncodedColumn, EncodedView, Encoder};
pub use folds::{bootstrap_indices, stratified_folds, FoldAssignment};
pub use manifest::{
    check_eligibility, DatasetManifest, Eligibility, ManifestEntry, RejectReason, MAX_FEATURES,
    MAX_INSTANCES, MIN_INSTANCES,
};

/// Tokens treated as missing in CSV input.
pub const MISSING_TOKENS: [&str; 3] = ["", "?", "NA"];

pub fn is_missing_token(token: &str) -> bool {
    MISSING_TOKENS.contains(&token.trim())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ColumnValues {
    Numeric(Vec<Option<f64>>),
    /// `levels` is the closed, sorted vocabulary; `codes` index into it.
    Categorical {
        levels: Vec<String>,
        codes: Vec<Option<u32>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub values: ColumnValues,
}

impl Column {
    pub fn numeric(name: impl Into<String>, values: Vec<Option<f64>>) -> Self {
        Column {
            name: name.into(),
            values: ColumnValues::Numeric(values),
        }
    }

    /// Builds a categorical column from raw tokens; `None` marks missing.
    pub fn categorical<S: AsRef<str>>(name: impl Into<String>, tokens: &[Option<S>]) -> Self {
        let levels: Vec<String> = tokens
            .iter()
            .flatten()
            .map(|t| t.as_ref().to_string())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index: HashMap<&str, u32> = levels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i as u32))
            .collect();
        let codes = tokens
            .iter()
            .map(|t| t.as_ref().map(|s| index[s.as_ref()]))
            .collect();
        Column {
            name: name.into(),
            values: ColumnValues::Categorical { levels, codes },
        }
    }

    pub fn kind(&self) -> ColumnKind {
        match self.values {
            ColumnValues::Numeric(_) => ColumnKind::Numeric,
            ColumnValues::Categorical { .. } => ColumnKind::Categorical,
        }
    }

    pub fn len(&self) -> usize {
        match &self.values {
            ColumnValues::Numeric(v) => v.len(),
            ColumnValues::Categorical { codes, .. } => codes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_missing(&self, row: usize) -> bool {
        match &self.values {
            ColumnValues::Numeric(v) => v[row].is_none(),
            ColumnValues::Categorical { codes, .. } => codes[row].is_none(),
        }
    }

    pub fn missing_count(&self) -> usize {
        (0..self.len()).filter(|&r| self.is_missing(r)).count()
    }

    pub fn as_numeric(&self) -> Option<&[Option<f64>]> {
        match &self.values {
            ColumnValues::Numeric(v) => Some(v),
            ColumnValues::Categorical { .. } => None,
        }
    }

    pub fn as_codes(&self) -> Option<&[Option<u32>]> {
        match &self.values {
            ColumnValues::Numeric(_) => None,
            ColumnValues::Categorical { codes, .. } => Some(codes),
        }
    }

    pub fn levels(&self) -> &[String] {
        match &self.values {
            ColumnValues::Numeric(_) => &[],
            ColumnValues::Categorical { levels, .. } => levels,
        }
    }

    fn select(&self, rows: &[usize]) -> Column {
        let values = match &self.values {
            ColumnValues::Numeric(v) => ColumnValues::Numeric(rows.iter().map(|&r| v[r]).collect()),
            ColumnValues::Categorical { levels, codes } => ColumnValues::Categorical {
                levels: levels.clone(),
                codes: rows.iter().map(|&r| codes[r]).collect(),
            },
        };
        Column {
            name: self.name.clone(),
            values,
        }
    }
}

/// Immutable classification dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub id: String,
    pub columns: Vec<Column>,
    pub target_name: String,
    /// Class index per row, into `class_labels`.
    pub target: Vec<usize>,
    /// Sorted distinct target labels.
    pub class_labels: Vec<String>,
    /// Rows dropped at load time because the target was missing.
    pub dropped_rows: usize,
}

impl Dataset {
    /// Assembles a dataset from feature columns and raw target labels.
    pub fn new<S: AsRef<str>>(
        id: impl Into<String>,
        columns: Vec<Column>,
        target_name: impl Into<String>,
        labels: &[S],
    ) -> Result<Self> {
        let id = id.into();
        let class_labels: Vec<String> = labels
            .iter()
            .map(|l| l.as_ref().to_string())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if class_labels.len() < 2 {
            return Err(Error::TooFewClasses {
                id,
                found: class_labels.len(),
            });
        }
        let n = labels.len();
        for c in &columns {
            if c.len() != n {
                return Err(Error::InvalidDataset(format!(
                    "column `{}` has {} rows, target has {}",
                    c.name,
                    c.len(),
                    n
                )));
            }
            if let ColumnValues::Numeric(v) = &c.values {
                if v.iter().flatten().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidDataset(format!(
                        "column `{}` has non-finite values",
                        c.name
                    )));
                }
            }
        }
        let target = labels
            .iter()
            .map(|l| {
                class_labels
                    .binary_search_by(|c| c.as_str().cmp(l.as_ref()))
                    .expect("label present")
            })
            .collect();
        Ok(Dataset {
            id,
            columns,
            target_name: target_name.into(),
            target,
            class_labels,
            dropped_rows: 0,
        })
    }

    /// All-numeric dataset from a row-major matrix, mostly for tests and examples.
    pub fn from_rows<S: AsRef<str>>(id: &str, rows: &[Vec<f64>], labels: &[S]) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        let columns = (0..width)
            .map(|j| Column::numeric(format!("x{j}"), rows.iter().map(|r| Some(r[j])).collect()))
            .collect();
        Dataset::new(id, columns, "class", labels)
    }

    pub fn n(&self) -> usize {
        self.target.len()
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_labels.len()
    }

    pub fn all_rows(&self) -> Vec<usize> {
        (0..self.n()).collect()
    }

    pub fn class_counts(&self, rows: &[usize]) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &r in rows {
            counts[self.target[r]] += 1;
        }
        counts
    }

    pub fn numeric_columns(&self) -> impl Iterator<Item = (usize, &[Option<f64>])> {
        self.columns
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.as_numeric().map(|v| (i, v)))
    }

    pub fn categorical_columns(&self) -> impl Iterator<Item = (usize, &[Option<u32>])> {
        self.columns
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.as_codes().map(|v| (i, v)))
    }

    /// Subset of rows, keeping vocabularies and class labels.
    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        Dataset {
            id: self.id.clone(),
            columns: self.columns.iter().map(|c| c.select(rows)).collect(),
            target_name: self.target_name.clone(),
            target: rows.iter().map(|&r| self.target[r]).collect(),
            class_labels: self.class_labels.clone(),
            dropped_rows: self.dropped_rows,
        }
    }

    /// Order-independent key of one row's content (features and label).
    pub fn row_key(&self, row: usize) -> u64 {
        let mut bytes = Vec::with_capacity(9 * (self.columns.len() + 1));
        for c in &self.columns {
            match &c.values {
                ColumnValues::Numeric(v) => match v[row] {
                    Some(x) => {
                        bytes.push(1);
                        // +0.0 and -0.0 compare equal; hash them alike
                        bytes.extend_from_slice(&(x + 0.0).to_bits().to_le_bytes());
                    }
                    None => bytes.push(0),
                },
                ColumnValues::Categorical { codes, .. } => match codes[row] {
                    Some(x) => {
                        bytes.push(2);
                        bytes.extend_from_slice(&x.to_le_bytes());
                    }
                    None => bytes.push(0),
                },
            }
        }
        bytes.extend_from_slice(&(self.target[row] as u64).to_le_bytes());
        seed::fnv1a(&bytes)
    }

    /// Stable hash of the full dataset content.
    pub fn content_hash(&self) -> u64 {
        let mut keys: Vec<u64> = (0..self.n()).map(|r| self.row_key(r)).collect();
        keys.sort_unstable();
        let mut bytes: Vec<u8> = self.id.bytes().collect();
        for c in &self.columns {
            bytes.extend_from_slice(c.name.as_bytes());
            bytes.push(0);
        }
        for k in keys {
            bytes.extend_from_slice(&k.to_le_bytes());
        }
        seed::fnv1a(&bytes)
    }
}

/// Reads a CSV file into a [`Dataset`] whose id is the file stem.
pub fn load_csv(
    path: impl AsRef<Path>,
    target_name: &str,
    schema_hints: &BTreeMap<String, ColumnKind>,
) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    read_csv(file, &id, target_name, schema_hints)
}

/// Reads CSV from any reader. Header row required.
pub fn read_csv<R: Read>(
    reader: R,
    id: &str,
    target_name: &str,
    schema_hints: &BTreeMap<String, ColumnKind>,
) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let target_idx = headers
        .iter()
        .position(|h| h == target_name)
        .ok_or_else(|| Error::MissingTarget(target_name.to_string()))?;

    let mut raw: Vec<Vec<String>> = vec![Vec::new(); headers.len()];
    let mut dropped = 0;
    for record in rdr.records() {
        let record = record?;
        if record.len() != headers.len() {
            return Err(Error::InvalidDataset(format!(
                "row has {} fields, header has {}",
                record.len(),
                headers.len()
            )));
        }
        if is_missing_token(&record[target_idx]) {
            dropped += 1;
            continue;
        }
        for (j, field) in record.iter().enumerate() {
            raw[j].push(field.to_string());
        }
    }

    let labels = std::mem::take(&mut raw[target_idx]);
    let columns = headers
        .iter()
        .zip(raw)
        .enumerate()
        .filter(|(j, _)| *j != target_idx)
        .map(|(_, (name, tokens))| build_column(name, tokens, schema_hints.get(name).copied()))
        .collect::<Result<Vec<_>>>()?;

    let mut d = Dataset::new(id, columns, target_name, &labels)?;
    d.dropped_rows = dropped;
    Ok(d)
}

fn build_column(name: &str, tokens: Vec<String>, hint: Option<ColumnKind>) -> Result<Column> {
    let parsed: Vec<Option<Option<f64>>> = tokens
        .iter()
        .map(|t| {
            if is_missing_token(t) {
                Some(None)
            } else {
                t.parse::<f64>().ok().filter(|x| x.is_finite()).map(Some)
            }
        })
        .collect();
    let all_numeric = parsed.iter().all(Option::is_some);
    let kind = hint.unwrap_or(if all_numeric {
        ColumnKind::Numeric
    } else {
        ColumnKind::Categorical
    });
    match kind {
        ColumnKind::Numeric => {
            if !all_numeric {
                return Err(Error::InvalidDataset(format!(
                    "column `{name}` hinted numeric but has non-numeric tokens"
                )));
            }
            Ok(Column::numeric(name, parsed.into_iter().flatten().collect()))
        }
        ColumnKind::Categorical => {
            let toks: Vec<Option<&str>> = tokens
                .iter()
                .map(|t| (!is_missing_token(t)).then_some(t.as_str()))
                .collect();
            Ok(Column::categorical(name, &toks))
        }
    }
}

/// Writes a dataset back to CSV, target last.
pub fn write_csv(d: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<&str> = d.columns.iter().map(|c| c.name.as_str()).collect();
    header.push(&d.target_name);
    w.write_record(&header)?;
    for r in 0..d.n() {
        let mut rec: Vec<String> = d
            .columns
            .iter()
            .map(|c| match &c.values {
                ColumnValues::Numeric(v) => v[r].map_or_else(|| "?".to_string(), |x| x.to_string()),
                ColumnValues::Categorical { levels, codes } => {
                    codes[r].map_or_else(|| "?".to_string(), |k| levels[k as usize].clone())
                }
            })
            .collect();
        rec.push(d.class_labels[d.target[r]].clone());
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}
