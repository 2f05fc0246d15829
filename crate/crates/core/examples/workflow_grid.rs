//! The 63 bagging workflows: enumerate the grid, fit one pruned dynamic
//! workflow, and cross-validate a handful of configurations.
//!
//! `cargo run --release --example workflow_grid`

use autobagging::dataset::{stratified_folds, Dataset};
use autobagging::synth::blobs;
use autobagging::workflows::{
    enumerate_workflows, evaluate_grid, fit_workflow, parse_workflow_id, WorkflowSettings,
};

pub fn run_example(d: &Dataset, seed: u64) -> autobagging::Result<Vec<(String, f64)>> {
    let grid = enumerate_workflows();
    println!("{} workflows, e.g. {} .. {}", grid.len(), grid[0].id(), grid[grid.len() - 1].id());

    let settings = WorkflowSettings::default();
    let folds = stratified_folds(d, 4, seed)?;
    let train = folds.train_rows(1);
    let test = folds.test_rows(1);
    let wf = fit_workflow(&parse_workflow_id("100bb0.5knora-e")?, d, &train, seed, &settings);
    let correct = test.iter().filter(|&&r| wf.predict(d, r) == d.target[r]).count();
    println!(
        "100bb0.5knora-e kept {} of 100 trees, fold-1 accuracy {:.3}",
        wf.models.len(),
        correct as f64 / test.len() as f64
    );

    let some: Vec<_> = ["50nonenone", "100nonenone", "100mdsq0.75ola", "200bb0.25knora-e"]
        .iter()
        .map(|s| parse_workflow_id(s))
        .collect::<autobagging::Result<_>>()?;
    let outcomes = evaluate_grid(d, &folds, &some, seed, &settings);
    for o in &outcomes {
        println!("{:<18} mean kappa {:.3}", o.config.id(), o.mean_kappa);
    }
    Ok(outcomes.into_iter().map(|o| (o.config.id(), o.mean_kappa)).collect())
}

#[allow(dead_code)]
fn main() -> autobagging::Result<()> {
    let d = blobs("blobs", 400, 3, 4, 1.2, 11)?;
    run_example(&d, 3).map(|_| ())
}
