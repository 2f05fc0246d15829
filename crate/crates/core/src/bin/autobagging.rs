use std::path::PathBuf;
use std::process::ExitCode;

use autobagging::pipeline::{cmd_benchmark, cmd_build, cmd_ingest, cmd_rank, cmd_train, RunConfig};
use autobagging::Result;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "autobagging", version, about = "Rank bagging workflows for tabular classification datasets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the datasets of a manifest into a store.
    Ingest(Common),
    /// Evaluate the workflow grid and write the metadatabase.
    Build(Common),
    /// Train the ranker on the metadatabase.
    Train(Common),
    /// Rank the workflows for a new dataset.
    Rank {
        #[command(flatten)]
        common: Common,
        /// CSV of the dataset to rank for.
        #[arg(long)]
        dataset: PathBuf,
        /// Target column of the dataset.
        #[arg(long)]
        target: String,
        /// Model file; defaults to <out>/model.json.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Leave-one-dataset-out benchmark with exports.
    Benchmark(Common),
}

#[derive(Args)]
struct Common {
    /// JSON config file with the same keys as the flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dataset manifest (ingest).
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Output directory shared by all commands.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Root seed; required.
    #[arg(long)]
    seed: Option<u64>,
    /// Cross-validation folds per dataset [default: 4].
    #[arg(long)]
    folds: Option<usize>,
    /// Worker threads [default: all cores].
    #[arg(long)]
    workers: Option<usize>,
    /// Cutoff for MAP@k [default: 10].
    #[arg(long = "map-k")]
    map_k: Option<usize>,
    /// Nemenyi significance level, 0.05 or 0.10 [default: 0.05].
    #[arg(long)]
    alpha: Option<f64>,
    /// Boosting rounds [default: 200].
    #[arg(long)]
    rounds: Option<usize>,
    /// Maximum ranker tree depth [default: 4].
    #[arg(long)]
    depth: Option<usize>,
    /// Ranker learning rate [default: 0.1].
    #[arg(long)]
    eta: Option<f64>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = &self.manifest {
            c.manifest = Some(v.clone());
        }
        if let Some(v) = &self.out {
            c.out = v.clone();
        }
        c.seed = self.seed.or(c.seed);
        c.workers = self.workers.or(c.workers);
        c.folds = self.folds.unwrap_or(c.folds);
        c.map_k = self.map_k.unwrap_or(c.map_k);
        c.alpha = self.alpha.unwrap_or(c.alpha);
        c.rounds = self.rounds.unwrap_or(c.rounds);
        c.depth = self.depth.unwrap_or(c.depth);
        c.eta = self.eta.unwrap_or(c.eta);
        Ok(c)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest(common) => {
            let store = cmd_ingest(&common.resolve()?)?;
            for e in &store.entries {
                println!("{}\t{}", e.id, e.reason.as_deref().unwrap_or("eligible"));
            }
            println!("store hash {}", store.store_hash);
        }
        Command::Build(common) => {
            let s = cmd_build(&common.resolve()?)?;
            println!(
                "{} datasets, {} performance rows ({} reused, {} computed, {} quarantined)",
                s.datasets, s.performance_rows, s.reused, s.computed, s.quarantined
            );
        }
        Command::Train(common) => {
            let b = cmd_train(&common.resolve()?)?;
            println!("trained {} trees on {} features", b.ranker.trees.len(), b.ranker.feature_names.len());
        }
        Command::Rank {
            common,
            dataset,
            target,
            model,
        } => {
            let ranked = cmd_rank(&common.resolve()?, model.as_deref(), &dataset, &target)?;
            for (i, (w, s)) in ranked.iter().enumerate() {
                println!("{}\t{w}\t{s:.6}", i + 1);
            }
        }
        Command::Benchmark(common) => {
            let r = cmd_benchmark(&common.resolve()?)?;
            println!("MAP autoBagging {:.4}  average_rank {:.4}", r.map_autobagging, r.map_average_rank);
            for m in autobagging::evaluation::METHODS {
                if let Some(k) = r.mean_kappa(m) {
                    println!("{m:<15} mean kappa {k:.4}");
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
