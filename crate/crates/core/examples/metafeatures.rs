//! Characterize a dataset: build the 158-entry registry, profile a dataset
//! once, and complete the vector for two workflows.
//!
//! `cargo run --release --example metafeatures`

use autobagging::dataset::{load_csv, Dataset};
use autobagging::metafeatures::{
    build_registry, compute_vector, profile_dataset, Block, MetafeatureVector, RankTable, RegistryConfig,
};
use autobagging::workflows::parse_workflow_id;

pub fn run_example(d: &Dataset, seed: u64) -> autobagging::Result<Vec<MetafeatureVector>> {
    let registry = build_registry(RegistryConfig::default())?;
    println!(
        "{} metafeatures: {} systematic, {} simple, {} workflow",
        registry.len(),
        registry.block_len(Block::Systematic),
        registry.block_len(Block::Simple),
        registry.block_len(Block::Workflow)
    );
    let profile = profile_dataset(d, &registry, seed)?;
    // no training datasets here, so the rank features stay missing
    let ranks = RankTable::default();
    let mut out = Vec::new();
    for id in ["100nonenone", "200mdsq0.5knora-e"] {
        let v = compute_vector(&profile, &parse_workflow_id(id)?, &ranks, &registry)?;
        let present = v.values.iter().filter(|x| x.is_some()).count();
        println!("{id}: {present} of {} values present", v.values.len());
        out.push(v);
    }
    for name in ["n_examples", "class.entropy", "naive_bayes.landmarker.accuracy", "attr_pair.mic.max", "workflow.n_trees"] {
        let i = registry.index_of(name).expect("registered name");
        println!("{name:<32} {:?}", out[1].values[i]);
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> autobagging::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/iris.csv");
    let d = load_csv(path, "species", &Default::default())?;
    run_example(&d, 1).map(|_| ())
}
