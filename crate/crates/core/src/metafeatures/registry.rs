//! The metafeature registry: an ordered, versioned list of specs built by
//! crossing meta-functions, input objects and post-processors.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::functions::PostProcessor;
use super::landmarkers::Landmarker;
use crate::error::{Error, Result};
use crate::workflows::{Integration, Pruning};

pub const REGISTRY_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetaFunction {
    Skewness,
    Pearson,
    Mic,
    Entropy,
    MutualInformation,
    EtaSquared,
    RValue,
    Rank,
    NExamples,
    NAttributes,
    NClasses,
    Accuracy,
    NTrees,
    PruningMethod,
    CutPoint,
    IntegrationMethod,
}

/// What a meta-function is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputObject {
    DiscreteAttributes,
    ContinuousAttributes,
    Target,
    Landmarker(Landmarker),
    /// The dataset as a whole (class-overlap measures, size counts).
    Dataset,
    /// The workflow under characterization.
    Workflow,
}

impl InputObject {
    fn is_discrete(self) -> bool {
        matches!(
            self,
            InputObject::DiscreteAttributes | InputObject::Target | InputObject::Landmarker(_)
        )
    }

    /// Objects resolving to many columns yield a multiset of values.
    fn is_multi(self) -> bool {
        matches!(self, InputObject::DiscreteAttributes | InputObject::ContinuousAttributes)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Block {
    Systematic,
    Simple,
    Workflow,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MetafeatureSpec {
    pub name: String,
    pub block: Block,
    pub function: MetaFunction,
    pub inputs: Vec<InputObject>,
    pub post: PostProcessor,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegistryConfig {
    pub hist_bins: usize,
    pub r_value_k: usize,
    pub r_value_theta: usize,
    pub mic_alpha: f64,
    pub mic_clumps: usize,
}

impl Default for RegistryConfig {
    fn default() -> Self {
        RegistryConfig {
            hist_bins: 10,
            r_value_k: 7,
            r_value_theta: 2,
            mic_alpha: 0.6,
            mic_clumps: 15,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Registry {
    pub version: u32,
    pub config: RegistryConfig,
    /// Integer codes of the categorical workflow descriptors.
    pub codebook: BTreeMap<String, BTreeMap<String, u32>>,
    pub specs: Vec<MetafeatureSpec>,
    /// SHA-256 over everything above.
    pub hash: String,
}

fn object_name(o: InputObject) -> String {
    match o {
        InputObject::DiscreteAttributes | InputObject::ContinuousAttributes => "attr".into(),
        InputObject::Target => "class".into(),
        InputObject::Landmarker(l) => l.prefix().into(),
        InputObject::Dataset | InputObject::Workflow => String::new(),
    }
}

fn function_name(f: MetaFunction) -> &'static str {
    match f {
        MetaFunction::Skewness => "skewness",
        MetaFunction::Pearson => "pearson",
        MetaFunction::Mic => "mic",
        MetaFunction::Entropy => "entropy",
        MetaFunction::MutualInformation => "mutual_information",
        MetaFunction::EtaSquared => "eta_squared",
        MetaFunction::RValue => "r_value",
        MetaFunction::Rank => "rank",
        MetaFunction::NExamples => "n_examples",
        MetaFunction::NAttributes => "n_attributes",
        MetaFunction::NClasses => "n_classes",
        MetaFunction::Accuracy => "accuracy",
        MetaFunction::NTrees => "n_trees",
        MetaFunction::PruningMethod => "pruning",
        MetaFunction::CutPoint => "cut_point",
        MetaFunction::IntegrationMethod => "integration",
    }
}

/// Base name of a systematic spec before the post-processor suffix:
/// `attr.skewness`, `attr_pair.mic`, `attr_class.eta_squared`,
/// `class.entropy`, `naive_bayes.landmarker.mutual_information`, `r_value`.
fn systematic_base(f: MetaFunction, inputs: &[InputObject]) -> String {
    let fname = function_name(f);
    match inputs {
        [InputObject::Dataset] | [InputObject::Workflow] => fname.into(),
        [a] => format!("{}.{fname}", object_name(*a)),
        [a, InputObject::Target] if a.is_multi() => format!("attr_class.{fname}"),
        [a, InputObject::Target] => format!("{}.{fname}", object_name(*a)),
        [_, _] => format!("attr_pair.{fname}"),
        _ => unreachable!("one or two inputs"),
    }
}

fn unary_ok(f: MetaFunction, o: InputObject) -> bool {
    match f {
        MetaFunction::Skewness => o == InputObject::ContinuousAttributes,
        MetaFunction::Entropy => o.is_discrete(),
        MetaFunction::RValue => o == InputObject::Dataset,
        MetaFunction::Rank => o == InputObject::Workflow,
        _ => false,
    }
}

fn binary_ok(f: MetaFunction, a: InputObject, b: InputObject) -> bool {
    match f {
        MetaFunction::Pearson | MetaFunction::Mic => {
            a == InputObject::ContinuousAttributes && b == InputObject::ContinuousAttributes
        }
        MetaFunction::MutualInformation => a.is_discrete() && b.is_discrete(),
        MetaFunction::EtaSquared => a == InputObject::ContinuousAttributes && b.is_discrete(),
        _ => false,
    }
}

/// Kept pairings: two columns of the same attribute kind, or any object
/// against the target.
fn pair_selected(a: InputObject, b: InputObject) -> bool {
    (a == b && a.is_multi()) || (b == InputObject::Target && a != InputObject::Target)
}

fn posts(multi: bool, bins: usize) -> Vec<PostProcessor> {
    if !multi {
        return vec![PostProcessor::Identity];
    }
    let mut out = vec![
        PostProcessor::Avg,
        PostProcessor::Max,
        PostProcessor::Min,
        PostProcessor::Sd,
        PostProcessor::Var,
    ];
    out.extend((1..=bins).map(|bin| PostProcessor::Hist { bin, bins }));
    out
}

fn push(specs: &mut Vec<MetafeatureSpec>, block: Block, function: MetaFunction, inputs: Vec<InputObject>, base: String, multi: bool, bins: usize) {
    for post in posts(multi, bins) {
        let name = match post {
            PostProcessor::Identity => base.clone(),
            p => format!("{base}.{}", p.suffix()),
        };
        specs.push(MetafeatureSpec {
            name,
            block,
            function,
            inputs: inputs.clone(),
            post,
        });
    }
}

fn systematic_specs(bins: usize) -> Vec<MetafeatureSpec> {
    use MetaFunction::*;
    let mut objects = vec![
        InputObject::DiscreteAttributes,
        InputObject::ContinuousAttributes,
        InputObject::Target,
    ];
    objects.extend(Landmarker::ALL.map(InputObject::Landmarker));
    objects.extend([InputObject::Dataset, InputObject::Workflow]);

    let mut specs = Vec::new();
    for f in [Skewness, Pearson, Mic, Entropy, MutualInformation, EtaSquared, RValue, Rank] {
        for &a in &objects {
            if unary_ok(f, a) {
                let multi = a.is_multi() || matches!(a, InputObject::Dataset | InputObject::Workflow);
                push(&mut specs, Block::Systematic, f, vec![a], systematic_base(f, &[a]), multi, bins);
            }
            for &b in &objects {
                if binary_ok(f, a, b) && pair_selected(a, b) {
                    let base = systematic_base(f, &[a, b]);
                    push(&mut specs, Block::Systematic, f, vec![a, b], base, a.is_multi(), bins);
                }
            }
        }
    }
    specs
}

fn simple_specs() -> Vec<MetafeatureSpec> {
    let mut specs = Vec::new();
    for f in [MetaFunction::NExamples, MetaFunction::NAttributes, MetaFunction::NClasses] {
        push(&mut specs, Block::Simple, f, vec![InputObject::Dataset], function_name(f).into(), false, 0);
    }
    for l in Landmarker::ALL {
        let o = InputObject::Landmarker(l);
        let base = format!("{}.accuracy", l.prefix());
        push(&mut specs, Block::Simple, MetaFunction::Accuracy, vec![o, InputObject::Target], base, false, 0);
    }
    specs
}

fn workflow_specs() -> Vec<MetafeatureSpec> {
    let mut specs = Vec::new();
    for f in [
        MetaFunction::NTrees,
        MetaFunction::PruningMethod,
        MetaFunction::CutPoint,
        MetaFunction::IntegrationMethod,
    ] {
        let base = format!("workflow.{}", function_name(f));
        push(&mut specs, Block::Workflow, f, vec![InputObject::Workflow], base, false, 0);
    }
    specs
}

fn codebook() -> BTreeMap<String, BTreeMap<String, u32>> {
    let pruning = Pruning::ALL.iter().map(|p| (p.token().to_string(), p.code() as u32)).collect();
    let integration = Integration::ALL
        .iter()
        .map(|i| (i.token().to_string(), i.code() as u32))
        .collect();
    BTreeMap::from([("integration".to_string(), integration), ("pruning".to_string(), pruning)])
}

fn digest(version: u32, config: &RegistryConfig, codebook: &BTreeMap<String, BTreeMap<String, u32>>, specs: &[MetafeatureSpec]) -> String {
    let body = serde_json::to_vec(&(version, config, codebook, specs)).expect("registry serializes");
    Sha256::digest(&body).iter().map(|b| format!("{b:02x}")).collect()
}

/// Builds the registry: systematic block, then simple measures and
/// landmarker accuracies, then workflow descriptors.
pub fn build_registry(config: RegistryConfig) -> Result<Registry> {
    if config.hist_bins == 0 || config.r_value_k == 0 {
        return Err(Error::InvalidArgument("histogram bins and r-value k must be positive".into()));
    }
    let mut specs = systematic_specs(config.hist_bins);
    specs.extend(simple_specs());
    specs.extend(workflow_specs());
    let mut seen = HashSet::new();
    if let Some(dup) = specs.iter().find(|s| !seen.insert(s.name.as_str())) {
        return Err(Error::InvalidArgument(format!("duplicate metafeature name {}", dup.name)));
    }
    let codebook = codebook();
    let hash = digest(REGISTRY_VERSION, &config, &codebook, &specs);
    Ok(Registry {
        version: REGISTRY_VERSION,
        config,
        codebook,
        specs,
        hash,
    })
}

impl Registry {
    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.specs.iter().map(|s| s.name.clone()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.specs.iter().position(|s| s.name == name)
    }

    pub fn block_len(&self, block: Block) -> usize {
        self.specs.iter().filter(|s| s.block == block).count()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    /// Loads a manifest and checks its hash against its content.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let reg: Registry = serde_json::from_str(&text)?;
        let expected = digest(reg.version, &reg.config, &reg.codebook, &reg.specs);
        if expected != reg.hash {
            return Err(Error::ManifestMismatch {
                expected,
                found: reg.hash,
            });
        }
        Ok(reg)
    }
}
