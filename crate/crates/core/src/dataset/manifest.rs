use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{load_csv, ColumnKind, Dataset};
use crate::error::{Error, Result};

pub const MIN_INSTANCES: usize = 300;
pub const MAX_INSTANCES: usize = 5000;
pub const MAX_FEATURES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "reason")]
pub enum RejectReason {
    TooSmall { n: usize },
    TooLarge { n: usize },
    TooWide { features: usize },
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::TooSmall { n } => write!(f, "too_small ({n} < {MIN_INSTANCES} instances)"),
            RejectReason::TooLarge { n } => write!(f, "too_large ({n} > {MAX_INSTANCES} instances)"),
            RejectReason::TooWide { features } => {
                write!(f, "too_wide ({features} > {MAX_FEATURES} attributes)")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Eligibility {
    Eligible,
    Rejected(RejectReason),
}

impl Eligibility {
    pub fn is_eligible(&self) -> bool {
        matches!(self, Eligibility::Eligible)
    }
}

/// Instance and attribute bounds for datasets entering the metadatabase.
pub fn check_eligibility(d: &Dataset) -> Eligibility {
    let n = d.n();
    if n < MIN_INSTANCES {
        Eligibility::Rejected(RejectReason::TooSmall { n })
    } else if n > MAX_INSTANCES {
        Eligibility::Rejected(RejectReason::TooLarge { n })
    } else if d.n_features() > MAX_FEATURES {
        Eligibility::Rejected(RejectReason::TooWide {
            features: d.n_features(),
        })
    } else {
        Eligibility::Eligible
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    /// Relative paths resolve against the manifest's directory.
    pub path: PathBuf,
    pub target: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub schema_hints: BTreeMap<String, ColumnKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eligibility: Option<Eligibility>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub datasets: Vec<ManifestEntry>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl DatasetManifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut m: DatasetManifest = serde_json::from_str(&text)?;
        m.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let mut ids: Vec<&str> = m.datasets.iter().map(|e| e.id.as_str()).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::malformed(path, format!("duplicate dataset id `{}`", w[0])));
        }
        Ok(m)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn resolve(&self, entry: &ManifestEntry) -> PathBuf {
        if entry.path.is_absolute() {
            entry.path.clone()
        } else {
            self.base_dir.join(&entry.path)
        }
    }

    /// Loads one entry; the dataset takes the manifest id.
    pub fn load_entry(&self, entry: &ManifestEntry) -> Result<Dataset> {
        let mut d = load_csv(self.resolve(entry), &entry.target, &entry.schema_hints)?;
        d.id = entry.id.clone();
        Ok(d)
    }
}
