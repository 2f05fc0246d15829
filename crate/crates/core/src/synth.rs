//! Synthetic classification datasets and the desk-scale benchmark suite.
//!
//! Each generator covers a different regime (overlapping blobs, XOR,
//! concentric rings, categorical rules, missing values, class imbalance,
//! label noise, irrelevant features) so the suite spreads out across
//! metafeature space.

use std::path::Path;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::{write_csv, Column, DatasetManifest, Dataset, ManifestEntry};
use crate::error::{Error, Result};
use crate::metadb::{assemble, MetaDataset, PerformanceRecord, PerformanceTable};
use crate::metafeatures::MetafeatureVector;
use crate::workflows::enumerate_workflows;
use crate::seed;

/// Normal draw by the Box-Muller transform.
pub fn gaussian<R: Rng>(rng: &mut R, mean: f64, sd: f64) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    mean + sd * (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn numeric_dataset(id: &str, rows: Vec<Vec<Option<f64>>>, labels: Vec<String>) -> Result<Dataset> {
    let width = rows.first().map_or(0, Vec::len);
    let columns = (0..width)
        .map(|j| Column::numeric(format!("x{j}"), rows.iter().map(|r| r[j]).collect()))
        .collect();
    Dataset::new(id, columns, "class", &labels)
}

fn flip(rng: &mut ChaCha8Rng, label: usize, n_classes: usize, p: f64) -> usize {
    if rng.gen::<f64>() < p {
        (label + rng.gen_range(1..n_classes)) % n_classes
    } else {
        label
    }
}

fn label(c: usize) -> String {
    format!("c{c}")
}

/// Gaussian blobs around random centers.
pub fn blobs(id: &str, n: usize, n_classes: usize, dim: usize, spread: f64, seed: u64) -> Result<Dataset> {
    let mut rng = seed::rng(seed);
    let centers: Vec<Vec<f64>> = (0..n_classes)
        .map(|_| (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect())
        .collect();
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let c = i % n_classes;
        rows.push(centers[c].iter().map(|&m| Some(gaussian(&mut rng, m, spread))).collect());
        labels.push(label(c));
    }
    numeric_dataset(id, rows, labels)
}

/// Two informative coordinates in XOR layout plus noise dimensions.
pub fn xor(id: &str, n: usize, noise_dims: usize, flip_p: f64, seed: u64) -> Result<Dataset> {
    let mut rng = seed::rng(seed);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let a: f64 = rng.gen_range(-1.0..1.0);
        let b: f64 = rng.gen_range(-1.0..1.0);
        let c = usize::from((a > 0.0) != (b > 0.0));
        let mut r = vec![Some(a), Some(b)];
        r.extend((0..noise_dims).map(|_| Some(rng.gen_range(-1.0..1.0))));
        rows.push(r);
        labels.push(label(flip(&mut rng, c, 2, flip_p)));
    }
    numeric_dataset(id, rows, labels)
}

/// Concentric rings: the class is the radius band.
pub fn rings(id: &str, n: usize, n_classes: usize, seed: u64) -> Result<Dataset> {
    let mut rng = seed::rng(seed);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let c = i % n_classes;
        let radius = 1.0 + c as f64 + gaussian(&mut rng, 0.0, 0.25);
        let angle = rng.gen_range(0.0..std::f64::consts::TAU);
        rows.push(vec![
            Some(radius * angle.cos()),
            Some(radius * angle.sin()),
            Some(gaussian(&mut rng, 0.0, 1.0)),
        ]);
        labels.push(label(c));
    }
    numeric_dataset(id, rows, labels)
}

/// Axis-aligned checkerboard over a `cells x cells` grid.
pub fn checkerboard(id: &str, n: usize, cells: usize, seed: u64) -> Result<Dataset> {
    let mut rng = seed::rng(seed);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let a: f64 = rng.gen_range(0.0..cells as f64);
        let b: f64 = rng.gen_range(0.0..cells as f64);
        let c = (a.floor() as usize + b.floor() as usize) % 2;
        rows.push(vec![Some(a), Some(b)]);
        labels.push(label(flip(&mut rng, c, 2, 0.05)));
    }
    numeric_dataset(id, rows, labels)
}

/// Linear boundary with label noise, `informative` of `dim` coordinates used.
pub fn noisy_linear(id: &str, n: usize, dim: usize, informative: usize, flip_p: f64, seed: u64) -> Result<Dataset> {
    let mut rng = seed::rng(seed);
    let w: Vec<f64> = (0..informative).map(|_| rng.gen_range(0.5..1.5)).collect();
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let x: Vec<f64> = (0..dim).map(|_| gaussian(&mut rng, 0.0, 1.0)).collect();
        let s: f64 = w.iter().zip(&x).map(|(a, b)| a * b).sum();
        labels.push(label(flip(&mut rng, usize::from(s > 0.0), 2, flip_p)));
        rows.push(x.into_iter().map(Some).collect());
    }
    numeric_dataset(id, rows, labels)
}

/// Two Gaussian classes with a minority fraction and a mean shift.
pub fn imbalanced(id: &str, n: usize, minority: f64, shift: f64, seed: u64) -> Result<Dataset> {
    let mut rng = seed::rng(seed);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let c = usize::from((i as f64 + 0.5) / n as f64 >= 1.0 - minority);
        let m = c as f64 * shift;
        rows.push((0..4).map(|j| Some(gaussian(&mut rng, if j < 2 { m } else { 0.0 }, 1.0))).collect());
        labels.push(label(c));
    }
    numeric_dataset(id, rows, labels)
}

/// Categorical attributes with a rule-based target and one numeric noise column.
pub fn categorical_rules(id: &str, n: usize, seed: u64) -> Result<Dataset> {
    let mut rng = seed::rng(seed);
    let levels = ["a", "b", "c", "d"];
    let mut cats: Vec<Vec<Option<&str>>> = (0..4).map(|_| Vec::with_capacity(n)).collect();
    let mut noise = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let v: Vec<usize> = (0..4).map(|_| rng.gen_range(0..levels.len())).collect();
        let c = if v[0] == 0 || (v[1] >= 2 && v[2] != 3) { 1 } else { 0 };
        for (col, &x) in cats.iter_mut().zip(&v) {
            col.push(Some(levels[x]));
        }
        noise.push(Some(gaussian(&mut rng, 0.0, 1.0)));
        labels.push(label(flip(&mut rng, c, 2, 0.08)));
    }
    let mut columns: Vec<Column> = cats
        .iter()
        .enumerate()
        .map(|(j, c)| Column::categorical(format!("k{j}"), c))
        .collect();
    columns.push(Column::numeric("noise", noise));
    Dataset::new(id, columns, "class", &labels)
}

/// Mixed numeric and categorical attributes with missing entries, 3 classes.
pub fn mixed_missing(id: &str, n: usize, missing: f64, seed: u64) -> Result<Dataset> {
    let mut rng = seed::rng(seed);
    let colors = ["red", "green", "blue"];
    let mut num: Vec<Vec<Option<f64>>> = (0..3).map(|_| Vec::with_capacity(n)).collect();
    let mut cat: Vec<Option<&str>> = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let c = i % 3;
        let base = [c as f64, (2 - c) as f64 * 0.7, 0.0];
        for (j, col) in num.iter_mut().enumerate() {
            let v = gaussian(&mut rng, base[j], 1.0);
            col.push((rng.gen::<f64>() >= missing).then_some(v));
        }
        let color = if rng.gen::<f64>() < 0.6 { c } else { rng.gen_range(0..3) };
        cat.push((rng.gen::<f64>() >= missing).then_some(colors[color]));
        labels.push(label(c));
    }
    let mut columns: Vec<Column> = num
        .into_iter()
        .enumerate()
        .map(|(j, v)| Column::numeric(format!("m{j}"), v))
        .collect();
    columns.push(Column::categorical("color", &cat));
    Dataset::new(id, columns, "class", &labels)
}

/// One informative coordinate hidden among `noise_dims` irrelevant ones.
pub fn irrelevant(id: &str, n: usize, noise_dims: usize, seed: u64) -> Result<Dataset> {
    let mut rng = seed::rng(seed);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let x0 = gaussian(&mut rng, 0.0, 1.0);
        let mut r = vec![Some(x0)];
        r.extend((0..noise_dims).map(|_| Some(gaussian(&mut rng, 0.0, 1.0))));
        rows.push(r);
        labels.push(label(flip(&mut rng, usize::from(x0 > 0.3), 2, 0.1)));
    }
    numeric_dataset(id, rows, labels)
}

/// The synthetic half of the desk suite.
pub fn synthetic_suite(seed: u64) -> Result<Vec<Dataset>> {
    let s = |i: u64| seed::derive(seed, i);
    Ok(vec![
        blobs("synth_blobs", 480, 3, 4, 1.2, s(1))?,
        xor("synth_xor", 400, 2, 0.05, s(2))?,
        rings("synth_rings", 450, 3, s(3))?,
        checkerboard("synth_checker", 400, 3, s(4))?,
        noisy_linear("synth_linear", 500, 6, 3, 0.2, s(5))?,
        imbalanced("synth_imbalanced", 500, 0.1, 1.5, s(6))?,
        categorical_rules("synth_categorical", 420, s(7))?,
        mixed_missing("synth_missing", 450, 0.15, s(8))?,
        irrelevant("synth_irrelevant", 400, 7, s(9))?,
        blobs("synth_blobs_easy", 360, 2, 3, 0.6, s(10))?,
    ])
}

/// Bundled public datasets: (id, file contents, target column).
const PUBLIC: [(&str, &str, &str); 4] = [
    ("breast_cancer", include_str!("../data/breast_cancer.csv"), "target"),
    ("anes96", include_str!("../data/anes96.csv"), "vote"),
    ("modechoice", include_str!("../data/modechoice.csv"), "choice"),
    ("fair", include_str!("../data/fair.csv"), "affairs"),
];

/// Writes the desk suite (4 public CSVs and 10 synthetic datasets) into
/// `dir` with a `manifest.json`, and returns the manifest.
pub fn write_desk_suite(dir: impl AsRef<Path>, seed: u64) -> Result<DatasetManifest> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut entries = Vec::new();
    for (id, text, target) in PUBLIC {
        let file = format!("{id}.csv");
        let path = dir.join(&file);
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        entries.push(ManifestEntry {
            id: id.to_string(),
            path: file.into(),
            target: target.to_string(),
            schema_hints: Default::default(),
            eligibility: None,
        });
    }
    for d in synthetic_suite(seed)? {
        let file = format!("{}.csv", d.id);
        write_csv(&d, dir.join(&file))?;
        entries.push(ManifestEntry {
            id: d.id.clone(),
            path: file.into(),
            target: d.target_name.clone(),
            schema_hints: Default::default(),
            eligibility: None,
        });
    }
    let manifest = DatasetManifest {
        datasets: entries,
        base_dir: dir.to_path_buf(),
    };
    manifest.save(dir.join("manifest.json"))?;
    Ok(manifest)
}

/// Meta-data with a planted dataset/workflow interaction.
///
/// Every dataset has a latent position `z` and every workflow a position
/// `c` in [0, 1]; the expected kappa falls off with `(z - c)^2`, so the best
/// workflows move with the dataset and a single global order (the average
/// rank) cannot be right everywhere. Features are `z`, `c` and
/// `noise_features` pure-noise columns. Workflow ids are the real grid.
pub fn planted_metadata(n_datasets: usize, noise_features: usize, seed: u64) -> Result<(MetaDataset, PerformanceTable)> {
    let mut rng = seed::rng(seed);
    let grid = enumerate_workflows();
    let positions: Vec<f64> = (0..grid.len()).map(|i| i as f64 / (grid.len() - 1) as f64).collect();
    let mut names = vec!["planted.z".to_string(), "planted.c".to_string()];
    names.extend((0..noise_features).map(|j| format!("noise.{j}")));
    let mut records = Vec::new();
    let mut vectors = Vec::new();
    for d in 0..n_datasets {
        let id = format!("planted_{d:03}");
        let z: f64 = rng.gen();
        let noise: Vec<f64> = (0..noise_features).map(|_| rng.gen()).collect();
        for (w, &c) in grid.iter().zip(&positions) {
            let folds: Vec<Option<f64>> = (0..4)
                .map(|_| Some(0.9 - 0.6 * (z - c).powi(2) + gaussian(&mut rng, 0.0, 0.01)))
                .collect();
            let mean = folds.iter().flatten().sum::<f64>() / 4.0;
            records.push(PerformanceRecord {
                dataset_id: id.clone(),
                workflow_id: w.id(),
                fold_kappas: folds,
                mean_kappa: mean,
                flagged: false,
            });
            let mut x = vec![Some(z), Some(c)];
            x.extend(noise.iter().map(|&v| Some(v)));
            vectors.push(MetafeatureVector {
                dataset_id: id.clone(),
                workflow_id: w.id(),
                values: x,
            });
        }
    }
    let table = PerformanceTable::new(records)?;
    let meta = assemble(&table, &names, &vectors)?;
    Ok((meta, table))
}
