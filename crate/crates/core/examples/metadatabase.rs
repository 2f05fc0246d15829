//! Build a small metadatabase: cross-validated kappa of part of the grid on
//! three synthetic datasets, dataset profiles, and the joined meta-dataset
//! with rank-derived relevance labels.
//!
//! `cargo run --release --example metadatabase`

use autobagging::dataset::Dataset;
use autobagging::metadb::{build_performance_table, MetaDataset};
use autobagging::metafeatures::{build_registry, profile_dataset, RegistryConfig};
use autobagging::pipeline::global_metadataset;
use autobagging::synth::{irrelevant, rings, xor};
use autobagging::workflows::{enumerate_workflows, WorkflowConfig, WorkflowSettings};

pub fn run_example(datasets: &[Dataset], grid: &[WorkflowConfig], seed: u64) -> autobagging::Result<MetaDataset> {
    let report = build_performance_table(datasets, grid, 4, seed, &WorkflowSettings::default(), None)?;
    println!("{} performance records", report.table.len());
    for id in report.table.dataset_ids() {
        let best = report
            .table
            .dataset(&id)
            .iter()
            .max_by(|a, b| a.mean_kappa.total_cmp(&b.mean_kappa))
            .expect("non-empty dataset");
        println!("{id:<12} best {} (kappa {:.3})", best.workflow_id, best.mean_kappa);
    }
    let registry = build_registry(RegistryConfig::default())?;
    let profiles = datasets
        .iter()
        .map(|d| profile_dataset(d, &registry, seed))
        .collect::<autobagging::Result<Vec<_>>>()?;
    let meta = global_metadataset(&profiles, &report.table, &registry)?;
    let g = &meta.groups[0];
    println!(
        "meta-dataset: {} groups x {} examples x {} features; top of {}: {}",
        meta.n_groups(),
        g.examples.len(),
        meta.feature_names.len(),
        g.dataset_id,
        g.examples.iter().max_by_key(|e| e.relevance).map_or("", |e| e.workflow_id.as_str())
    );
    Ok(meta)
}

#[allow(dead_code)]
fn main() -> autobagging::Result<()> {
    let datasets = vec![
        xor("xor", 300, 2, 0.05, 1)?,
        rings("rings", 300, 2, 2)?,
        irrelevant("irrelevant", 300, 5, 3)?,
    ];
    // every third workflow keeps the example quick
    let grid: Vec<_> = enumerate_workflows().into_iter().step_by(3).collect();
    run_example(&datasets, &grid, 5).map(|_| ())
}
