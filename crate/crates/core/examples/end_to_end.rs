//! The whole offline and online path through the pipeline commands:
//! ingest the desk suite, build the metadatabase, train, benchmark with
//! leave-one-dataset-out, then rank workflows for a dataset the model has
//! never seen.
//!
//! `cargo run --release --example end_to_end -- [out_dir]`
//! (about a minute on one core with the full grid)

use std::path::{Path, PathBuf};

use autobagging::dataset::write_csv;
use autobagging::evaluation::BenchmarkReport;
use autobagging::pipeline::{cmd_rank, run_all, RunConfig};
use autobagging::synth::{checkerboard, write_desk_suite};

pub fn run_example(out: &Path, workflows: Option<Vec<String>>) -> autobagging::Result<(BenchmarkReport, Vec<(String, f64)>)> {
    let suite = out.join("suite");
    write_desk_suite(&suite, 2017)?;
    let config = RunConfig {
        manifest: Some(suite.join("manifest.json")),
        out: out.join("run"),
        seed: Some(2017),
        workflows,
        ..RunConfig::default()
    };
    let report = run_all(&config)?;
    println!(
        "MAP@{}: autoBagging {:.3}, average rank {:.3}",
        config.map_k, report.map_autobagging, report.map_average_rank
    );
    for method in ["autoBagging", "average_rank"] {
        println!("{method:<12} loss@1 {:.4}", report.loss_at(method, 1).unwrap_or(f64::NAN));
    }

    let new = checkerboard("fresh_checkerboard", 500, 4, 99)?;
    let csv = out.join("fresh_checkerboard.csv");
    write_csv(&new, &csv)?;
    let ranked = cmd_rank(&config, None, &csv, "class")?;
    println!("recommended for the new dataset: {:?}", &ranked[..3.min(ranked.len())]);
    Ok((report, ranked))
}

#[allow(dead_code)]
fn main() -> autobagging::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map_or_else(|| std::env::temp_dir().join("autobagging-e2e"), PathBuf::from);
    run_example(&out, None).map(|_| ())
}
