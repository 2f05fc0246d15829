//! Train the pairwise gradient-boosted ranker, inspect its loss and feature
//! importance, and check that a saved model scores identically.
//!
//! `cargo run --release --example train_ranker`

use autobagging::ranker::{GBRanker, RankerConfig};
use autobagging::synth::planted_metadata;

pub fn run_example(n_datasets: usize, rounds: usize, dir: &std::path::Path) -> autobagging::Result<GBRanker> {
    let (meta, _) = planted_metadata(n_datasets, 2, 3)?;
    let config = RankerConfig {
        rounds,
        ..RankerConfig::default()
    };
    let (model, report) = GBRanker::train_with_report(&meta, config)?;
    println!(
        "{} trees, pairwise loss {:.2} -> {:.2}",
        model.trees.len(),
        report.losses[0],
        report.losses[report.losses.len() - 1]
    );
    for (name, gain) in model.feature_gain().iter().take(3) {
        println!("{name:<12} {gain:.3}");
    }

    let path = dir.join("ranker.json");
    model.save(&path)?;
    let loaded = GBRanker::load(&path)?;
    let probe = &meta.groups[0].examples[0].x;
    assert_eq!(model.score(probe), loaded.score(probe));

    let ranked = model.rank_workflows(&model.feature_hash, &meta.vectors()[..63])?;
    println!("top workflows for {}: {:?}", meta.groups[0].dataset_id, &ranked[..3]);
    Ok(model)
}

#[allow(dead_code)]
fn main() -> autobagging::Result<()> {
    run_example(12, 200, &std::env::temp_dir()).map(|_| ())
}
