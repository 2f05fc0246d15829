use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pruning {
    None,
    Mdsq,
    Bb,
}

impl Pruning {
    pub const ALL: [Pruning; 3] = [Pruning::None, Pruning::Mdsq, Pruning::Bb];

    pub fn token(self) -> &'static str {
        match self {
            Pruning::None => "none",
            Pruning::Mdsq => "mdsq",
            Pruning::Bb => "bb",
        }
    }

    /// Numeric code used by the workflow metafeatures.
    pub fn code(self) -> f64 {
        match self {
            Pruning::None => 0.0,
            Pruning::Mdsq => 1.0,
            Pruning::Bb => 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integration {
    Vote,
    Ola,
    KnoraE,
}

impl Integration {
    pub const ALL: [Integration; 3] = [Integration::Vote, Integration::Ola, Integration::KnoraE];

    /// Plain voting is written `none` in workflow ids.
    pub fn token(self) -> &'static str {
        match self {
            Integration::Vote => "none",
            Integration::Ola => "ola",
            Integration::KnoraE => "knora-e",
        }
    }

    pub fn code(self) -> f64 {
        match self {
            Integration::Vote => 0.0,
            Integration::Ola => 1.0,
            Integration::KnoraE => 2.0,
        }
    }
}

/// Pruning cut point, stored in percent to keep equality exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CutPoint(u8);

impl CutPoint {
    pub const P25: CutPoint = CutPoint(25);
    pub const P50: CutPoint = CutPoint(50);
    pub const P75: CutPoint = CutPoint(75);
    pub const ALL: [CutPoint; 3] = [CutPoint::P25, CutPoint::P50, CutPoint::P75];

    pub fn fraction(self) -> f64 {
        f64::from(self.0) / 100.0
    }

    fn token(self) -> &'static str {
        match self.0 {
            25 => "0.25",
            50 => "0.5",
            75 => "0.75",
            _ => unreachable!("cut points are 25, 50 or 75 percent"),
        }
    }
}

/// How a cut point translates into a retained ensemble size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutSemantics {
    /// The cut point is the fraction of models removed.
    #[default]
    FractionPruned,
    /// The cut point is the fraction of models kept.
    FractionKept,
}

pub const ENSEMBLE_SIZES: [usize; 3] = [50, 100, 200];

/// One bagging workflow: ensemble size, pruning, cut point and integration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WorkflowConfig {
    pub n_models: usize,
    pub pruning: Pruning,
    /// Present iff `pruning != None`.
    pub cut_point: Option<CutPoint>,
    pub integration: Integration,
}

impl WorkflowConfig {
    pub fn new(
        n_models: usize,
        pruning: Pruning,
        cut_point: Option<CutPoint>,
        integration: Integration,
    ) -> Result<Self> {
        if n_models == 0 {
            return Err(Error::InvalidArgument("ensemble size must be positive".into()));
        }
        if (pruning == Pruning::None) != cut_point.is_none() {
            return Err(Error::InvalidArgument(
                "cut point must be present exactly when pruning is configured".into(),
            ));
        }
        Ok(WorkflowConfig {
            n_models,
            pruning,
            cut_point,
            integration,
        })
    }

    /// The plain bagging baseline with 100 trees and voting.
    pub fn bagging100() -> Self {
        WorkflowConfig {
            n_models: 100,
            pruning: Pruning::None,
            cut_point: None,
            integration: Integration::Vote,
        }
    }

    /// Canonical id, e.g. `200bb0.75knora-e` or `100nonenone`.
    pub fn id(&self) -> String {
        let cut = self.cut_point.map_or("", CutPoint::token);
        format!(
            "{}{}{}{}",
            self.n_models,
            self.pruning.token(),
            cut,
            self.integration.token()
        )
    }

    /// Number of models retained after pruning.
    pub fn retained(&self, semantics: CutSemantics) -> usize {
        match self.cut_point {
            None => self.n_models,
            Some(cut) => {
                let frac = match semantics {
                    CutSemantics::FractionPruned => 1.0 - cut.fraction(),
                    CutSemantics::FractionKept => cut.fraction(),
                };
                // integer arithmetic in percent avoids 0.75*100 = 75.00000000000001 issues
                let pct = (frac * 100.0).round() as usize;
                (self.n_models * pct).div_ceil(100).max(1)
            }
        }
    }
}

impl fmt::Display for WorkflowConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

/// Parses a canonical workflow id.
pub fn parse_workflow_id(text: &str) -> Result<WorkflowConfig> {
    let err = || Error::ParseWorkflowId(text.to_string());
    let digits = text.bytes().take_while(u8::is_ascii_digit).count();
    let n_models: usize = text[..digits].parse().map_err(|_| err())?;
    let mut rest = &text[digits..];

    let pruning = Pruning::ALL
        .into_iter()
        .find(|p| rest.starts_with(p.token()))
        .ok_or_else(err)?;
    rest = &rest[pruning.token().len()..];

    let cut_point = if pruning == Pruning::None {
        None
    } else {
        let cut = CutPoint::ALL
            .into_iter()
            .find(|c| rest.starts_with(c.token()))
            .ok_or_else(err)?;
        rest = &rest[cut.token().len()..];
        Some(cut)
    };

    let integration = Integration::ALL
        .into_iter()
        .find(|i| rest == i.token())
        .ok_or_else(err)?;
    WorkflowConfig::new(n_models, pruning, cut_point, integration).map_err(|_| err())
}

impl FromStr for WorkflowConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_workflow_id(s)
    }
}

impl Serialize for WorkflowConfig {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.id())
    }
}

impl<'de> Deserialize<'de> for WorkflowConfig {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_workflow_id(&s).map_err(serde::de::Error::custom)
    }
}

/// The 63-workflow grid, sorted by canonical id.
pub fn enumerate_workflows() -> Vec<WorkflowConfig> {
    let mut out = Vec::with_capacity(63);
    for n_models in ENSEMBLE_SIZES {
        for pruning in Pruning::ALL {
            let cuts: Vec<Option<CutPoint>> = if pruning == Pruning::None {
                vec![None]
            } else {
                CutPoint::ALL.into_iter().map(Some).collect()
            };
            for cut_point in cuts {
                for integration in Integration::ALL {
                    out.push(WorkflowConfig {
                        n_models,
                        pruning,
                        cut_point,
                        integration,
                    });
                }
            }
        }
    }
    out.sort_by_key(WorkflowConfig::id);
    out
}
