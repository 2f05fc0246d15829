//! Leave-one-dataset-out on meta-data with a planted dataset/workflow
//! interaction: the ranker should beat the average-rank baseline clearly.
//!
//! `cargo run --release --example planted_signal`

use autobagging::evaluation::{benchmark, lodo_fixed, BenchmarkOptions, BenchmarkReport};
use autobagging::ranker::RankerConfig;
use autobagging::synth::planted_metadata;

pub fn run_example(n_datasets: usize, seed: u64) -> autobagging::Result<BenchmarkReport> {
    let (meta, performance) = planted_metadata(n_datasets, 3, seed)?;
    let folds = lodo_fixed(&meta, &performance, RankerConfig::default())?;
    let report = benchmark(folds, &performance, BenchmarkOptions::default())?;
    println!(
        "MAP@10 autoBagging {:.3} vs average rank {:.3}",
        report.map_autobagging, report.map_average_rank
    );
    for method in ["autoBagging", "average_rank"] {
        println!("{method:<12} loss@1 {:.4}", report.loss_at(method, 1).unwrap_or(f64::NAN));
    }
    Ok(report)
}

#[allow(dead_code)]
fn main() -> autobagging::Result<()> {
    run_example(20, 7).map(|_| ())
}
