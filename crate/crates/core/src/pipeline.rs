//! The ingest → build → train → rank/benchmark commands.
//!
//! Every command works inside one output directory, runs on a rayon pool of
//! the configured size, and writes `<command>.provenance.json` holding the
//! effective configuration, the registry hash, the crate version and hashes
//! of the files it consumed. Worker count and output path are deliberately
//! left out of provenance so that runs differing only in those are
//! byte-identical.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dataset::{check_eligibility, load_csv, DatasetManifest, Dataset, Eligibility, ManifestEntry};
use crate::error::{Error, Result};
use crate::evaluation::{benchmark, export_results, lodo, training_metadataset, BenchmarkOptions, BenchmarkReport};
use crate::metadb::{build_performance_table, MetaDataset, PerformanceTable};
use crate::metafeatures::{
    build_registry, compute_vector, profile_dataset, DatasetProfile, RankTable, Registry, RegistryConfig,
};
use crate::ranker::{GBRanker, RankerConfig};
use crate::seed;
use crate::workflows::{enumerate_workflows, parse_workflow_id, WorkflowConfig, WorkflowSettings};

pub const STORE_FILE: &str = "store.json";
pub const PERFORMANCE_FILE: &str = "performance.csv";
pub const PROFILES_FILE: &str = "profiles.json";
pub const REGISTRY_FILE: &str = "registry.json";
pub const MODEL_FILE: &str = "model.json";
pub const IMPORTANCE_FILE: &str = "importance.csv";
pub const BENCHMARK_DIR: &str = "benchmark";
pub const RANKINGS_DIR: &str = "rankings";

/// Effective run configuration. A JSON config file uses the same keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub manifest: Option<PathBuf>,
    #[serde(skip_serializing)]
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub folds: usize,
    /// Thread count; `None` uses the available parallelism.
    #[serde(skip_serializing)]
    pub workers: Option<usize>,
    pub map_k: usize,
    pub alpha: f64,
    pub rounds: usize,
    pub depth: usize,
    pub eta: f64,
    pub lambda: f64,
    pub min_child_weight: f64,
    pub subsample: f64,
    /// Restricts the grid to these workflow ids; `None` is all 63.
    pub workflows: Option<Vec<String>>,
    pub workflow_settings: WorkflowSettings,
    pub registry: RegistryConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        let r = RankerConfig::default();
        let b = BenchmarkOptions::default();
        RunConfig {
            manifest: None,
            out: PathBuf::from("autobagging-out"),
            seed: None,
            folds: 4,
            workers: None,
            map_k: b.map_k,
            alpha: b.alpha,
            rounds: r.rounds,
            depth: r.max_depth,
            eta: r.eta,
            lambda: r.lambda,
            min_child_weight: r.min_child_weight,
            subsample: r.subsample,
            workflows: None,
            workflow_settings: WorkflowSettings::default(),
            registry: RegistryConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::InvalidArgument("a seed is required (--seed or \"seed\" in the config file)".into()))
    }

    pub fn ranker(&self) -> Result<RankerConfig> {
        Ok(RankerConfig {
            rounds: self.rounds,
            max_depth: self.depth,
            eta: self.eta,
            lambda: self.lambda,
            min_child_weight: self.min_child_weight,
            subsample: self.subsample,
            base_score: 0.0,
            seed: seed::derive_str(self.seed()?, "ranker"),
        })
    }

    pub fn benchmark_options(&self) -> BenchmarkOptions {
        BenchmarkOptions {
            map_k: self.map_k,
            alpha: self.alpha,
        }
    }

    pub fn grid(&self) -> Result<Vec<WorkflowConfig>> {
        match &self.workflows {
            None => Ok(enumerate_workflows()),
            Some(ids) => {
                let mut grid = ids.iter().map(|s| parse_workflow_id(s)).collect::<Result<Vec<_>>>()?;
                grid.sort_by_key(WorkflowConfig::id);
                grid.dedup();
                if grid.is_empty() {
                    return Err(Error::InvalidArgument("the workflow grid override is empty".into()));
                }
                Ok(grid)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        self.seed()?;
        if self.folds < 2 {
            return Err(Error::InvalidArgument(format!("--folds must be at least 2, got {}", self.folds)));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidArgument("--workers must be positive".into()));
        }
        if self.map_k == 0 {
            return Err(Error::InvalidArgument("--map-k must be positive".into()));
        }
        if !(self.alpha == 0.05 || self.alpha == 0.10) {
            return Err(Error::InvalidArgument(format!(
                "--alpha must be 0.05 or 0.10 (Nemenyi tables), got {}",
                self.alpha
            )));
        }
        if !(self.eta > 0.0) || self.depth == 0 || !(self.subsample > 0.0 && self.subsample <= 1.0) {
            return Err(Error::InvalidArgument("ranker needs eta > 0, depth >= 1, 0 < subsample <= 1".into()));
        }
        Ok(())
    }

    fn in_pool<T: Send>(&self, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
        self.validate()?;
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(w) = self.workers {
            builder = builder.num_threads(w);
        }
        let pool = builder
            .build()
            .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
        pool.install(f)
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn file_hash(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(sha256_hex(&bytes))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path, hint: &str) -> Result<T> {
    if !path.exists() {
        return Err(Error::InvalidArgument(format!("{} not found; {hint}", path.display())));
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub command: String,
    pub code_version: String,
    pub config: RunConfig,
    pub registry_hash: Option<String>,
    /// sha256 of every file the command read.
    pub inputs: BTreeMap<String, String>,
}

fn write_provenance(
    config: &RunConfig,
    command: &str,
    registry_hash: Option<&str>,
    inputs: BTreeMap<String, String>,
) -> Result<Provenance> {
    let p = Provenance {
        command: command.to_string(),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        registry_hash: registry_hash.map(str::to_string),
        inputs,
    };
    write_json(&config.out.join(format!("{command}.provenance.json")), &p)?;
    Ok(p)
}

/// One manifest entry after validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoreEntry {
    pub id: String,
    pub path: PathBuf,
    pub target: String,
    #[serde(default, skip_serializing_if = "std::collections::BTreeMap::is_empty")]
    pub schema_hints: std::collections::BTreeMap<String, crate::dataset::ColumnKind>,
    pub eligible: bool,
    /// Why the dataset is excluded; `None` when eligible.
    pub reason: Option<String>,
    pub n_instances: Option<usize>,
    pub n_attributes: Option<usize>,
    pub n_classes: Option<usize>,
    pub dropped_rows: Option<usize>,
    pub content_hash: Option<String>,
}

/// The validated dataset store written by [`cmd_ingest`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Store {
    pub entries: Vec<StoreEntry>,
    pub store_hash: String,
}

impl Store {
    fn hash_entries(entries: &[StoreEntry]) -> Result<String> {
        Ok(sha256_hex(serde_json::to_string(entries)?.as_bytes()))
    }

    pub fn eligible(&self) -> impl Iterator<Item = &StoreEntry> {
        self.entries.iter().filter(|e| e.eligible)
    }

    pub fn load(out: &Path) -> Result<Store> {
        let path = out.join(STORE_FILE);
        let store: Store = read_json(&path, "run `autobagging ingest` first")?;
        if Store::hash_entries(&store.entries)? != store.store_hash {
            return Err(Error::malformed(&path, "store hash does not match its entries"));
        }
        Ok(store)
    }

    /// Loads every eligible dataset and checks it still matches the store.
    pub fn load_datasets(&self) -> Result<Vec<Dataset>> {
        self.eligible()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|e| {
                let mut d = load_csv(&e.path, &e.target, &e.schema_hints)?;
                d.id = e.id.clone();
                let hash = format!("{:016x}", d.content_hash());
                if Some(&hash) != e.content_hash.as_ref() {
                    return Err(Error::InvalidDataset(format!(
                        "{} changed since ingest; rerun `autobagging ingest`",
                        e.path.display()
                    )));
                }
                Ok(d)
            })
            .collect()
    }
}

fn validate_entry(manifest: &DatasetManifest, entry: &ManifestEntry) -> StoreEntry {
    let mut s = StoreEntry {
        id: entry.id.clone(),
        path: manifest.resolve(entry),
        target: entry.target.clone(),
        schema_hints: entry.schema_hints.clone(),
        eligible: false,
        reason: None,
        n_instances: None,
        n_attributes: None,
        n_classes: None,
        dropped_rows: None,
        content_hash: None,
    };
    if entry.id.contains([',', '"', '\n', '\r']) {
        s.reason = Some("dataset id must not contain commas, quotes or newlines".into());
        return s;
    }
    match manifest.load_entry(entry) {
        Err(e) => s.reason = Some(format!("load_error: {e}")),
        Ok(d) => {
            s.n_instances = Some(d.n());
            s.n_attributes = Some(d.n_features());
            s.n_classes = Some(d.n_classes());
            s.dropped_rows = Some(d.dropped_rows);
            s.content_hash = Some(format!("{:016x}", d.content_hash()));
            match check_eligibility(&d) {
                Eligibility::Eligible => s.eligible = true,
                Eligibility::Rejected(r) => s.reason = Some(r.to_string()),
            }
        }
    }
    s
}

/// Validates every manifest entry and writes `store.json`. Fails when no
/// dataset is eligible (the store is still written, with every reason).
pub fn cmd_ingest(config: &RunConfig) -> Result<Store> {
    config.in_pool(|| {
        let path = config
            .manifest
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("ingest needs --manifest".into()))?;
        let manifest = DatasetManifest::load(path)?;
        ensure_dir(&config.out)?;
        let mut entries: Vec<StoreEntry> = manifest
            .datasets
            .par_iter()
            .map(|e| validate_entry(&manifest, e))
            .collect();
        entries.sort_by(|a, b| a.id.cmp(&b.id));
        for e in &entries {
            match &e.reason {
                None => info!("{}: eligible ({} instances)", e.id, e.n_instances.unwrap_or(0)),
                Some(r) => info!("{}: rejected, {r}", e.id),
            }
        }
        let store = Store {
            store_hash: Store::hash_entries(&entries)?,
            entries,
        };
        write_json(&config.out.join(STORE_FILE), &store)?;
        let inputs = BTreeMap::from([("manifest".to_string(), file_hash(path)?)]);
        write_provenance(config, "ingest", None, inputs)?;
        if store.eligible().next().is_none() {
            let reasons: Vec<String> = store
                .entries
                .iter()
                .map(|e| format!("{}: {}", e.id, e.reason.as_deref().unwrap_or("?")))
                .collect();
            return Err(Error::InvalidArgument(format!("no eligible dataset ({})", reasons.join("; "))));
        }
        Ok(store)
    })
}

/// Seeds and hashes identifying a build; a resumed build must match.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildManifest {
    pub seed: u64,
    pub folds: usize,
    pub store_hash: String,
    pub registry_hash: String,
    pub registry_version: u32,
    pub workflows: Vec<String>,
    pub workflow_settings: WorkflowSettings,
    pub code_version: String,
}

/// Outcome of [`cmd_build`].
#[derive(Debug, Clone, PartialEq)]
pub struct BuildSummary {
    pub datasets: usize,
    pub performance_rows: usize,
    pub reused: usize,
    pub computed: usize,
    pub quarantined: usize,
}

fn load_profiles(path: &Path, registry: &Registry) -> Vec<DatasetProfile> {
    let Ok(text) = std::fs::read_to_string(path) else {
        return Vec::new();
    };
    let profiles: Vec<DatasetProfile> = serde_json::from_str(&text).unwrap_or_default();
    profiles
        .into_iter()
        .filter(|p| p.registry_hash == registry.hash)
        .collect()
}

/// Evaluates the grid on every eligible dataset, profiles the datasets and
/// writes the metadatabase. Completed work found in the output directory
/// is reused.
pub fn cmd_build(config: &RunConfig) -> Result<BuildSummary> {
    config.in_pool(|| {
        let seed = config.seed()?;
        let out = &config.out;
        let store = Store::load(out)?;
        let registry = build_registry(config.registry)?;
        let grid = config.grid()?;
        let manifest = BuildManifest {
            seed,
            folds: config.folds,
            store_hash: store.store_hash.clone(),
            registry_hash: registry.hash.clone(),
            registry_version: registry.version,
            workflows: grid.iter().map(WorkflowConfig::id).collect(),
            workflow_settings: config.workflow_settings,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
        };
        let manifest_path = out.join("build_manifest.json");
        if manifest_path.exists() {
            let previous: BuildManifest = read_json(&manifest_path, "")?;
            if previous != manifest {
                return Err(Error::InvalidArgument(format!(
                    "{} holds a build from different inputs or settings; use a fresh --out",
                    out.display()
                )));
            }
        }
        // written first so an interrupted build can only resume with the same inputs
        write_json(&manifest_path, &manifest)?;
        registry.save(out.join(REGISTRY_FILE))?;

        let datasets = store.load_datasets()?;
        info!("building metadatabase: {} datasets x {} workflows", datasets.len(), grid.len());
        let perf_path = out.join(PERFORMANCE_FILE);
        let report = build_performance_table(
            &datasets,
            &grid,
            config.folds,
            seed,
            &config.workflow_settings,
            Some(&perf_path),
        )?;
        info!("performance table: {} reused, {} computed", report.reused, report.computed);

        let profiles_path = out.join(PROFILES_FILE);
        let mut cached = load_profiles(&profiles_path, &registry);
        let mut profiles: Vec<DatasetProfile> = datasets
            .par_iter()
            .map(|d| match cached.iter().position(|p| p.dataset_id == d.id) {
                Some(_) => Ok(None),
                None => profile_dataset(d, &registry, seed).map(Some),
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        let ids: Vec<&str> = datasets.iter().map(|d| d.id.as_str()).collect();
        cached.retain(|p| ids.contains(&p.dataset_id.as_str()));
        profiles.append(&mut cached);
        profiles.sort_by(|a, b| a.dataset_id.cmp(&b.dataset_id));
        write_json(&profiles_path, &profiles)?;

        let meta = global_metadataset(&profiles, &report.table, &registry)?;
        meta.save(out)?;

        let inputs = BTreeMap::from([
            ("store".to_string(), store.store_hash.clone()),
            (PERFORMANCE_FILE.to_string(), file_hash(&perf_path)?),
        ]);
        write_provenance(config, "build", Some(&registry.hash), inputs)?;
        Ok(BuildSummary {
            datasets: datasets.len(),
            performance_rows: report.table.len(),
            reused: report.reused,
            computed: report.computed,
            quarantined: report.quarantined,
        })
    })
}

/// Meta-dataset for the final model: every built dataset, each with rank
/// features from the others.
pub fn global_metadataset(
    profiles: &[DatasetProfile],
    performance: &PerformanceTable,
    registry: &Registry,
) -> Result<MetaDataset> {
    training_metadataset(profiles, performance, registry)
}

/// A trained ranker with everything the online path needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub ranker: GBRanker,
    /// Rank distributions of the training datasets, for the rank features.
    pub ranks: RankTable,
    pub registry_config: RegistryConfig,
    pub registry_hash: String,
    /// Build seed; fixes the landmarker folds of new datasets.
    pub seed: u64,
    pub workflows: Vec<String>,
}

impl ModelBundle {
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_json(path.as_ref(), self)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<ModelBundle> {
        let path = path.as_ref();
        let b: ModelBundle = read_json(path, "run `autobagging train` first")?;
        if b.ranker.feature_hash != crate::ranker::feature_hash(&b.ranker.feature_names) {
            return Err(Error::malformed(path, "feature hash does not match feature names"));
        }
        Ok(b)
    }

    /// Ranks every workflow of the bundle's grid for `d`, best first.
    pub fn rank_dataset(&self, d: &Dataset) -> Result<Vec<(String, f64)>> {
        let registry = build_registry(self.registry_config)?;
        if registry.hash != self.registry_hash {
            return Err(Error::ManifestMismatch {
                expected: self.registry_hash.clone(),
                found: registry.hash,
            });
        }
        let profile = profile_dataset(d, &registry, self.seed)?;
        let vectors = self
            .workflows
            .iter()
            .map(|w| compute_vector(&profile, &parse_workflow_id(w)?, &self.ranks, &registry))
            .collect::<Result<Vec<_>>>()?;
        self.ranker.rank_workflows(&self.ranker.feature_hash, &vectors)
    }
}

/// Trains the ranker on the metadatabase and writes model.json and
/// importance.csv.
pub fn cmd_train(config: &RunConfig) -> Result<ModelBundle> {
    config.in_pool(|| {
        let out = &config.out;
        let missing = |f: &str| {
            Error::InvalidArgument(format!(
                "{} not found; run `autobagging build` with --out {} first",
                out.join(f).display(),
                out.display()
            ))
        };
        for f in ["metafeatures.csv", "metatarget.csv", PERFORMANCE_FILE, "build_manifest.json"] {
            if !out.join(f).exists() {
                return Err(missing(f));
            }
        }
        let build: BuildManifest = read_json(&out.join("build_manifest.json"), "")?;
        let meta = MetaDataset::load(out)?;
        let performance = PerformanceTable::load(out.join(PERFORMANCE_FILE))?;
        let (ranker, report) = GBRanker::train_with_report(&meta, config.ranker()?)?;
        info!(
            "trained {} trees, loss {:.4} -> {:.4}",
            ranker.trees.len(),
            report.losses.first().copied().unwrap_or(f64::NAN),
            report.losses.last().copied().unwrap_or(f64::NAN)
        );
        let bundle = ModelBundle {
            ranker,
            ranks: RankTable::from_performance(&performance),
            registry_config: config.registry,
            registry_hash: build.registry_hash.clone(),
            seed: build.seed,
            workflows: build.workflows.clone(),
        };
        bundle.save(out.join(MODEL_FILE))?;
        bundle.ranker.write_importance(out.join(IMPORTANCE_FILE))?;
        let inputs = BTreeMap::from([
            ("metafeatures.csv".to_string(), file_hash(&out.join("metafeatures.csv"))?),
            ("metatarget.csv".to_string(), file_hash(&out.join("metatarget.csv"))?),
            (PERFORMANCE_FILE.to_string(), file_hash(&out.join(PERFORMANCE_FILE))?),
        ]);
        write_provenance(config, "train", Some(&build.registry_hash), inputs)?;
        Ok(bundle)
    })
}

/// Ranks the workflows for a new dataset CSV with a trained model and
/// writes `rankings/<id>.csv` (position,workflow_id,score).
pub fn cmd_rank(config: &RunConfig, model: Option<&Path>, csv: &Path, target: &str) -> Result<Vec<(String, f64)>> {
    config.in_pool(|| {
        let model_path = model.map_or_else(|| config.out.join(MODEL_FILE), Path::to_path_buf);
        let bundle = ModelBundle::load(&model_path)?;
        let d = load_csv(csv, target, &Default::default())?;
        let ranked = bundle.rank_dataset(&d)?;
        let dir = config.out.join(RANKINGS_DIR);
        ensure_dir(&dir)?;
        let mut text = String::from("position,workflow_id,score\n");
        for (i, (w, s)) in ranked.iter().enumerate() {
            text.push_str(&format!("{},{w},{s}\n", i + 1));
        }
        let file = dir.join(format!("{}.csv", d.id));
        std::fs::write(&file, text).map_err(|e| Error::io(&file, e))?;
        let inputs = BTreeMap::from([
            ("model".to_string(), file_hash(&model_path)?),
            ("dataset".to_string(), file_hash(csv)?),
        ]);
        write_provenance(config, "rank", Some(&bundle.registry_hash), inputs)?;
        Ok(ranked)
    })
}

/// Runs the leave-one-dataset-out benchmark over the built metadatabase and
/// exports every table into `benchmark/`. Fails if any audit fails, after
/// writing the exports.
pub fn cmd_benchmark(config: &RunConfig) -> Result<BenchmarkReport> {
    config.in_pool(|| {
        let out = &config.out;
        let perf_path = out.join(PERFORMANCE_FILE);
        if !perf_path.exists() {
            return Err(Error::InvalidArgument(format!(
                "{} not found; run `autobagging build` first",
                perf_path.display()
            )));
        }
        let performance = PerformanceTable::load(&perf_path)?;
        let registry = Registry::load(out.join(REGISTRY_FILE))?;
        let profiles: Vec<DatasetProfile> = read_json(&out.join(PROFILES_FILE), "run `autobagging build` first")?;
        let folds = lodo(&profiles, &performance, &registry, config.ranker()?)?;
        let report = benchmark(folds, &performance, config.benchmark_options())?;
        let dir = out.join(BENCHMARK_DIR);
        export_results(&report, &performance, &dir)?;
        write_json(&dir.join("report.json"), &report)?;
        let inputs = BTreeMap::from([
            (PERFORMANCE_FILE.to_string(), file_hash(&perf_path)?),
            (PROFILES_FILE.to_string(), file_hash(&out.join(PROFILES_FILE))?),
        ]);
        write_provenance(config, "benchmark", Some(&registry.hash), inputs)?;
        info!(
            "MAP@{}: autoBagging {:.4}, average rank {:.4}",
            config.map_k, report.map_autobagging, report.map_average_rank
        );
        if !report.audit_passed() {
            let failed: Vec<String> = report
                .audit
                .iter()
                .filter(|a| !a.passed)
                .map(|a| format!("{}: {}", a.name, a.detail))
                .collect();
            return Err(Error::Audit(failed.join("; ")));
        }
        Ok(report)
    })
}

/// ingest, build, train and benchmark in sequence.
pub fn run_all(config: &RunConfig) -> Result<BenchmarkReport> {
    cmd_ingest(config)?;
    cmd_build(config)?;
    cmd_train(config)?;
    cmd_benchmark(config)
}
