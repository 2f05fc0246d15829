//! Writes the 14-dataset desk suite (4 bundled public CSVs and 10 synthetic
//! generators) with a manifest ready for `autobagging ingest`.
//!
//! `cargo run --example desk_suite -- <dir> [seed]`

use std::path::PathBuf;

use autobagging::synth::write_desk_suite;

pub fn run_example(dir: PathBuf, seed: u64) -> autobagging::Result<usize> {
    let manifest = write_desk_suite(&dir, seed)?;
    for e in &manifest.datasets {
        println!("{:<20} target={}", e.id, e.target);
    }
    println!("manifest written to {}", dir.join("manifest.json").display());
    Ok(manifest.datasets.len())
}

#[allow(dead_code)]
fn main() -> autobagging::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = args.next().map_or_else(|| std::env::temp_dir().join("autobagging-desk"), PathBuf::from);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(2017);
    run_example(dir, seed).map(|_| ())
}
