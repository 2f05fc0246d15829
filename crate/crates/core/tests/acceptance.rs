//! Acceptance criteria 1-10. Each test prints one `criterion N ...: PASS|FAIL`
//! line and then asserts. The end-to-end run on the desk suite is shared by
//! criteria 6, 8, 9 and 10.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use autobagging::dataset::{stratified_folds, write_csv};
use autobagging::evaluation::{
    average_precision_at_k, benchmark, critical_difference, friedman_nemenyi, kendall_tau, lodo_fixed, nemenyi_q,
    BenchmarkOptions, BenchmarkReport,
};
use autobagging::metadb::{cohen_kappa, tie_averaged_ranks, MetaDataset, MetaExample, MetaGroup, PerformanceTable};
use autobagging::metafeatures::{
    build_registry, compute_vector, entropy, eta_squared, mic, mutual_information, pearson, profile_dataset, skewness,
    Block, InputObject, RankTable, RegistryConfig,
};
use autobagging::pipeline::{cmd_rank, run_all, RunConfig};
use autobagging::ranker::{
    pairwise_gradients, pairwise_loss, split_gain, FeatureMatrix, GBRanker, RankerConfig, RegNode, TreeGrowth,
};
use autobagging::synth::{self, gaussian, planted_metadata, write_desk_suite};
use autobagging::workflows::{
    bb_order, enumerate_workflows, fit_workflow, knora_e_select, mdsq_order, ola_select, parse_workflow_id, prune_bb,
    prune_mdsq, CutPoint, PredictionTable, Pruning, SignatureMatrix, WorkflowSettings,
};
use rand::seq::SliceRandom;
use rand::Rng;

const SEED: u64 = 2017;

fn verdict(n: u32, name: &str, failures: &[String], extra: &str) -> bool {
    let pass = failures.is_empty();
    let detail = if pass {
        extra.to_string()
    } else {
        format!("{}; measured: {extra}", failures.join("; "))
    };
    println!("criterion {n} {name}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
    pass
}

fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    autobagging::seed::rng(seed)
}

// ---------------------------------------------------------------- shared run

struct EndToEnd {
    out_w1: PathBuf,
    out_w4: PathBuf,
    report: BenchmarkReport,
    elapsed: Duration,
    eligible: usize,
}

fn run_pipeline(root: &Path, workers: usize) -> (PathBuf, BenchmarkReport, Duration) {
    let out = root.join(format!("run_w{workers}"));
    let _ = std::fs::remove_dir_all(&out);
    let config = RunConfig {
        manifest: Some(root.join("suite/manifest.json")),
        out: out.clone(),
        seed: Some(SEED),
        workers: Some(workers),
        ..RunConfig::default()
    };
    let start = Instant::now();
    let report = run_all(&config).expect("pipeline run");
    let elapsed = start.elapsed();
    let probe = synth::rings("probe_rings", 400, 2, 5).unwrap();
    let csv = root.join("probe_rings.csv");
    write_csv(&probe, &csv).unwrap();
    cmd_rank(&config, None, &csv, "class").expect("rank");
    (out, report, elapsed)
}

fn end_to_end() -> &'static EndToEnd {
    static RUN: OnceLock<EndToEnd> = OnceLock::new();
    RUN.get_or_init(|| {
        let root = Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
        let _ = std::fs::remove_dir_all(&root);
        let manifest = write_desk_suite(root.join("suite"), SEED).unwrap();
        let (out_w1, report, elapsed) = run_pipeline(&root, 1);
        let (out_w4, _, _) = run_pipeline(&root, 4);
        let store: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out_w1.join("store.json")).unwrap()).unwrap();
        let eligible = store["entries"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|e| e["eligible"].as_bool() == Some(true))
            .count();
        assert_eq!(manifest.datasets.len(), 14);
        EndToEnd {
            out_w1,
            out_w4,
            report,
            elapsed,
            eligible,
        }
    })
}

// ---------------------------------------------------------------- criterion 1

#[test]
fn criterion_01_workflow_grid() {
    let start = Instant::now();
    let grid = enumerate_workflows();
    let mut f = Vec::new();
    if grid.len() != 63 {
        f.push(format!("{} configs", grid.len()));
    }
    let mut ids: Vec<String> = grid.iter().map(|c| c.id()).collect();
    for (c, id) in grid.iter().zip(&ids) {
        if parse_workflow_id(id).ok() != Some(*c) {
            f.push(format!("{id} does not round-trip"));
        }
    }
    ids.sort();
    ids.dedup();
    if ids.len() != 63 {
        f.push("duplicate ids".into());
    }
    let none = grid.iter().filter(|c| c.pruning == Pruning::None).count();
    if none != 9 {
        f.push(format!("{none} unpruned configs"));
    }
    let t = start.elapsed();
    if t >= Duration::from_secs(1) {
        f.push(format!("took {t:?}"));
    }
    assert!(verdict(1, "workflow grid", &f, &format!("63 ids, 9 unpruned, {t:?}")));
}

// ---------------------------------------------------------------- criterion 2

#[test]
fn criterion_02_metafeature_contract() {
    let start = Instant::now();
    let registry = build_registry(RegistryConfig::default()).unwrap();
    let mut f = Vec::new();
    let blocks = (
        registry.block_len(Block::Systematic),
        registry.block_len(Block::Simple),
        registry.block_len(Block::Workflow),
    );
    if registry.len() != 158 || blocks != (146, 8, 4) {
        f.push(format!("{} = {blocks:?}", registry.len()));
    }
    let store = vec![
        synth::xor("toy_xor", 300, 2, 0.05, 1).unwrap(),
        synth::mixed_missing("toy_missing", 300, 0.1, 2).unwrap(),
        synth::categorical_rules("toy_categorical", 300, 3).unwrap(),
    ];
    // rank features come from a small synthetic performance table
    let (_, perf) = planted_metadata(3, 0, 4).unwrap();
    let ranks = RankTable::from_performance(&perf);
    let dataset_block: Vec<usize> = registry
        .specs
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.inputs.contains(&InputObject::Workflow))
        .map(|(i, _)| i)
        .collect();
    for d in &store {
        let profile = profile_dataset(d, &registry, SEED).unwrap();
        let vectors: Vec<_> = enumerate_workflows()
            .iter()
            .map(|c| compute_vector(&profile, c, &ranks, &registry).unwrap())
            .collect();
        if vectors.iter().any(|v| v.values.len() != 158) {
            f.push(format!("{}: vector length", d.id));
        }
        for &i in &dataset_block {
            let first = vectors[0].values[i];
            if vectors.iter().any(|v| v.values[i].map(f64::to_bits) != first.map(f64::to_bits)) {
                f.push(format!("{}: {} varies across workflows", d.id, registry.specs[i].name));
            }
        }
    }
    let t = start.elapsed();
    if t >= Duration::from_secs(120) {
        f.push(format!("took {t:?}"));
    }
    assert!(verdict(
        2,
        "metafeature contract",
        &f,
        &format!("158 = 146 + 8 + 4, {} dataset-block entries constant, {t:?}", dataset_block.len())
    ));
}

// ---------------------------------------------------------------- criterion 3

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

fn oracle_kappa(t: &[usize], p: &[usize]) -> f64 {
    let k = t.iter().chain(p).max().unwrap() + 1;
    let mut m = vec![vec![0.0; k]; k];
    for (&a, &b) in t.iter().zip(p) {
        m[a][b] += 1.0;
    }
    let n = t.len() as f64;
    let po = (0..k).map(|i| m[i][i]).sum::<f64>() / n;
    let pe = (0..k)
        .map(|i| m[i].iter().sum::<f64>() * (0..k).map(|j| m[j][i]).sum::<f64>())
        .sum::<f64>()
        / (n * n);
    if pe >= 1.0 {
        return if po == 1.0 { 1.0 } else { 0.0 };
    }
    (po - pe) / (1.0 - pe)
}

fn oracle_entropy(v: &[usize]) -> f64 {
    let mut c: BTreeMap<usize, f64> = BTreeMap::new();
    for &x in v {
        *c.entry(x).or_default() += 1.0;
    }
    let n = v.len() as f64;
    c.values().map(|&k| -(k / n) * (k / n).log2()).sum()
}

fn oracle_mi(a: &[usize], b: &[usize]) -> f64 {
    // sum over the joint table of p(x,y) log p(x,y) / (p(x) p(y))
    let n = a.len() as f64;
    let mut total = 0.0;
    let xs: Vec<usize> = {
        let mut s = a.to_vec();
        s.sort();
        s.dedup();
        s
    };
    let ys: Vec<usize> = {
        let mut s = b.to_vec();
        s.sort();
        s.dedup();
        s
    };
    for &x in &xs {
        for &y in &ys {
            let pxy = a.iter().zip(b).filter(|&(&p, &q)| p == x && q == y).count() as f64 / n;
            if pxy > 0.0 {
                let px = a.iter().filter(|&&p| p == x).count() as f64 / n;
                let py = b.iter().filter(|&&q| q == y).count() as f64 / n;
                total += pxy * (pxy / (px * py)).log2();
            }
        }
    }
    total.max(0.0)
}

fn oracle_skewness(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let m2 = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let m3 = v.iter().map(|x| (x - mean) * (x - mean) * (x - mean)).sum::<f64>() / n;
    m3 / (m2 * m2.sqrt())
}

fn oracle_pearson(x: &[f64], y: &[f64]) -> f64 {
    // textbook sums formula
    let n = x.len() as f64;
    let (sx, sy) = (x.iter().sum::<f64>(), y.iter().sum::<f64>());
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    let syy: f64 = y.iter().map(|b| b * b).sum();
    (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt())
}

fn oracle_eta2(x: &[f64], g: &[usize]) -> f64 {
    // 1 - within / total
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let sst: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
    let mut ssw = 0.0;
    for grp in g.iter().collect::<std::collections::BTreeSet<_>>() {
        let vals: Vec<f64> = x.iter().zip(g).filter(|(_, h)| *h == grp).map(|(v, _)| *v).collect();
        let m = vals.iter().sum::<f64>() / vals.len() as f64;
        ssw += vals.iter().map(|v| (v - m).powi(2)).sum::<f64>();
    }
    1.0 - ssw / sst
}

fn oracle_ranks(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|&x| {
            let better = v.iter().filter(|&&o| o > x).count() as f64;
            let equal = v.iter().filter(|&&o| o == x).count() as f64;
            better + (equal + 1.0) / 2.0
        })
        .collect()
}

fn oracle_ap(predicted: &[String], kappas: &BTreeMap<String, f64>, k: usize) -> f64 {
    let relevant: Vec<&String> = kappas
        .keys()
        .filter(|w| kappas.values().filter(|&&o| o > kappas[*w]).count() < k)
        .collect();
    let mut score = 0.0;
    for i in 0..k.min(predicted.len()) {
        if relevant.contains(&&predicted[i]) {
            let hits = predicted[..=i].iter().filter(|p| relevant.contains(p)).count();
            score += hits as f64 / (i + 1) as f64;
        }
    }
    score / relevant.len().min(k) as f64
}

#[test]
fn criterion_03_statistical_kernels() {
    let mut r = rng(303);
    let mut f = Vec::new();
    let tol = 1e-9;
    for trial in 0..100 {
        let n = r.gen_range(5..40);
        let k = r.gen_range(2..5);
        let a: Vec<usize> = (0..n).map(|_| r.gen_range(0..k)).collect();
        let b: Vec<usize> = (0..n).map(|_| r.gen_range(0..k)).collect();
        let x: Vec<f64> = (0..n).map(|_| gaussian(&mut r, 0.0, 1.0)).collect();
        let y: Vec<f64> = x.iter().map(|v| v * r.gen_range(-1.0..1.0) + gaussian(&mut r, 0.0, 1.0)).collect();
        let (ao, bo): (Vec<_>, Vec<_>) = (a.iter().map(|&v| Some(v)).collect(), b.iter().map(|&v| Some(v)).collect());
        let (xo, yo): (Vec<_>, Vec<_>) = (x.iter().map(|&v| Some(v)).collect(), y.iter().map(|&v| Some(v)).collect());
        let checks = [
            ("kappa", cohen_kappa(&a, &b), oracle_kappa(&a, &b)),
            ("entropy", entropy(&ao).unwrap(), oracle_entropy(&a)),
            ("mi", mutual_information(&ao, &bo).unwrap(), oracle_mi(&a, &b)),
            ("skewness", skewness(&xo).unwrap(), oracle_skewness(&x)),
            ("pearson", pearson(&xo, &yo).unwrap(), oracle_pearson(&x, &y)),
        ];
        for (name, got, want) in checks {
            if !close(got, want, tol) {
                f.push(format!("{name} trial {trial}: {got} vs {want}"));
            }
        }
        let mut groups = a.clone();
        groups[0] = 0;
        groups[1] = 1;
        let go: Vec<_> = groups.iter().map(|&v| Some(v)).collect();
        let (got, want) = (eta_squared(&xo, &go).unwrap(), oracle_eta2(&x, &groups));
        if !close(got, want, tol) {
            f.push(format!("eta2 trial {trial}: {got} vs {want}"));
        }

        // ranks with deliberate ties
        let vals: Vec<f64> = (0..n).map(|_| f64::from(r.gen_range(0..6)) / 5.0).collect();
        if tie_averaged_ranks(&vals).iter().zip(oracle_ranks(&vals)).any(|(a, b)| !close(*a, b, tol)) {
            f.push(format!("ranks trial {trial}"));
        }

        // AP@10 over 20 workflows with tied kappas
        let kappas: BTreeMap<String, f64> = (0..20)
            .map(|i| (format!("w{i:02}"), f64::from(r.gen_range(0..8)) / 8.0))
            .collect();
        let mut predicted: Vec<String> = kappas.keys().cloned().collect();
        predicted.shuffle(&mut r);
        let relevant: Vec<String> = kappas
            .keys()
            .filter(|w| kappas.values().filter(|&&o| o > kappas[*w]).count() < 10)
            .cloned()
            .collect();
        let (got, want) = (average_precision_at_k(&predicted, &relevant, 10), oracle_ap(&predicted, &kappas, 10));
        if !close(got, want, tol) {
            f.push(format!("ap trial {trial}: {got} vs {want}"));
        }

        // Friedman / Nemenyi on a random score matrix
        let (nd, km) = (r.gen_range(3..15), r.gen_range(2..7));
        let scores: Vec<Vec<f64>> = (0..nd)
            .map(|_| (0..km).map(|_| f64::from(r.gen_range(0..5))).collect())
            .collect();
        let methods: Vec<String> = (0..km).map(|i| format!("m{i}")).collect();
        let res = friedman_nemenyi(&methods, &scores, 0.05).unwrap();
        let rank_sums: Vec<f64> = (0..km)
            .map(|j| scores.iter().map(|row| oracle_ranks(row)[j]).sum::<f64>())
            .collect();
        let (nf, kf) = (nd as f64, km as f64);
        let chi2 = 12.0 / (nf * kf * (kf + 1.0)) * rank_sums.iter().map(|s| s * s).sum::<f64>() - 3.0 * nf * (kf + 1.0);
        let cd = nemenyi_q(0.05, km).unwrap() * (kf * (kf + 1.0) / (6.0 * nf)).sqrt();
        for (j, s) in rank_sums.iter().enumerate() {
            if !close(res.average_ranks[j], s / nf, tol) {
                f.push(format!("friedman avg rank trial {trial}"));
            }
        }
        if let Some(c) = res.friedman_chi2 {
            if !close(c, chi2.max(0.0), tol) {
                f.push(format!("friedman chi2 trial {trial}: {c} vs {chi2}"));
            }
        }
        if !close(res.critical_difference, cd, tol) || !close(critical_difference(nemenyi_q(0.05, km).unwrap(), km, nd), cd, tol) {
            f.push(format!("nemenyi cd trial {trial}"));
        }
    }

    // MIC shape bounds at n = 100
    let mut r = rng(100);
    let x: Vec<Option<f64>> = (0..100).map(|_| Some(r.gen_range(0.0..1.0))).collect();
    let z: Vec<Option<f64>> = (0..100).map(|_| Some(r.gen_range(0.0..1.0))).collect();
    let m_id = mic(&x, &x).unwrap();
    let m_ind = mic(&x, &z).unwrap();
    if m_id < 0.99 - 1e-6 {
        f.push(format!("MIC(x, x) = {m_id}"));
    }
    if m_ind > 0.3 + 1e-6 {
        f.push(format!("MIC(independent) = {m_ind}"));
    }
    assert!(verdict(
        3,
        "statistical kernels vs oracles",
        &f,
        &format!("100 instances per kernel within 1e-9, MIC(x,x) {m_id:.3}, MIC(indep) {m_ind:.3}")
    ));
}

// ---------------------------------------------------------------- criterion 4

fn is_prefix(a: &[usize], b: &[usize]) -> bool {
    a.len() <= b.len() && a == &b[..a.len()]
}

#[test]
fn criterion_04_pruning_laws() {
    let start = Instant::now();
    let settings = WorkflowSettings::default();
    let toys = [
        synth::blobs("p_blobs", 160, 3, 3, 1.0, 1).unwrap(),
        synth::xor("p_xor", 160, 1, 0.1, 2).unwrap(),
        synth::categorical_rules("p_cat", 160, 3).unwrap(),
    ];
    let mut f = Vec::new();
    for d in &toys {
        let folds = stratified_folds(d, 4, 1).unwrap();
        let train = folds.train_rows(1);
        let mut members: HashMap<String, Vec<usize>> = HashMap::new();
        for c in enumerate_workflows() {
            let wf = fit_workflow(&c, d, &train, 9, &settings);
            let expected = match c.cut_point {
                None => c.n_models,
                Some(cut) => ((1.0 - cut.fraction()) * c.n_models as f64 - 1e-9).ceil() as usize,
            };
            if wf.models.len() != expected || wf.member_ids.len() != expected {
                f.push(format!("{} on {}: {} retained, expected {expected}", c.id(), d.id, wf.models.len()));
            }
            if c.pruning == Pruning::Bb {
                // the first member must have minimal pool error among all members kept
                let errs: Vec<usize> = (0..wf.models.len())
                    .map(|m| (0..wf.pool_labels.len()).filter(|&i| wf.pool_predictions.get(i, m) != wf.pool_labels[i]).count())
                    .collect();
                if errs.contains(&0) && errs[0] != 0 {
                    f.push(format!("{} on {}: zero-error member not first", c.id(), d.id));
                }
            }
            members.insert(c.id(), wf.member_ids);
        }
        // larger cut points keep prefixes of smaller ones
        for c in enumerate_workflows().iter().filter(|c| c.pruning != Pruning::None) {
            for other in CutPoint::ALL {
                let mut o = *c;
                o.cut_point = Some(other);
                let (a, b) = (&members[&c.id()], &members[&o.id()]);
                let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
                if !is_prefix(short, long) {
                    f.push(format!("{} vs {} on {}: not a prefix", c.id(), o.id(), d.id));
                }
            }
        }
    }

    let mut r = rng(404);
    for trial in 0..200 {
        let (n_rows, n_models) = (r.gen_range(4..30), r.gen_range(2..25));
        let labels: Vec<usize> = (0..n_rows).map(|_| r.gen_range(0..3)).collect();
        let mut rows: Vec<Vec<usize>> = (0..n_rows)
            .map(|i| (0..n_models).map(|_| if r.gen_bool(0.6) { labels[i] } else { r.gen_range(0..3) }).collect())
            .collect();
        let planted = r.gen_bool(0.5).then(|| r.gen_range(0..n_models));
        if let Some(p) = planted {
            for (row, &y) in rows.iter_mut().zip(&labels) {
                row[p] = y;
            }
        }
        let table = PredictionTable::from_rows(&rows);
        let sig = SignatureMatrix::from_predictions(&table, &labels, n_models);
        let (mo, bo) = (mdsq_order(&sig, 0.075), bb_order(&labels, &table, n_models));
        for keep in 1..=n_models {
            if prune_mdsq(&sig, keep, 0.075) != mo[..keep] || prune_bb(&labels, &table, keep) != bo[..keep] {
                f.push(format!("trial {trial} keep {keep}: prefix property"));
            }
        }
        let zero_err = |m: usize| (0..n_rows).all(|i| table.get(i, m) == labels[i]);
        if planted.is_some() && !zero_err(bo[0]) {
            f.push(format!("trial {trial}: BB first pick has errors"));
        }
    }
    let t = start.elapsed();
    if t >= Duration::from_secs(300) {
        f.push(format!("took {t:?}"));
    }
    assert!(verdict(4, "pruning laws", &f, &format!("63 configs x 3 toys, 200 random tables, {t:?}")));
}

// ---------------------------------------------------------------- criterion 5

#[test]
fn criterion_05_dynamic_integration() {
    let mut f = Vec::new();
    let mut r = rng(505);
    for trial in 0..10_000 {
        let (pool, n_models, classes) = (r.gen_range(1..25), r.gen_range(1..12), r.gen_range(2..4));
        let labels: Vec<usize> = (0..pool).map(|_| r.gen_range(0..classes)).collect();
        let rows: Vec<Vec<usize>> = (0..pool)
            .map(|_| (0..n_models).map(|_| r.gen_range(0..classes)).collect())
            .collect();
        let table = PredictionTable::from_rows(&rows);
        let mut nn: Vec<usize> = (0..pool).collect();
        nn.shuffle(&mut r);
        nn.truncate(r.gen_range(1..=pool));
        let chosen = knora_e_select(&nn, &labels, &table);
        // oracle: largest prefix with at least one member right on all of it
        let right = |m: usize, k: usize| nn[..k].iter().all(|&i| rows[i][m] == labels[i]);
        let expected: Vec<usize> = (1..=nn.len())
            .rev()
            .map(|k| (0..n_models).filter(|&m| right(m, k)).collect::<Vec<_>>())
            .find(|s| !s.is_empty())
            .unwrap_or_else(|| (0..n_models).collect());
        if chosen.is_empty() || chosen != expected {
            f.push(format!("knora-e trial {trial}: {chosen:?} vs {expected:?}"));
        }
        let hits = |m: usize| nn.iter().filter(|&&i| rows[i][m] == labels[i]).count();
        let best = (0..n_models).max_by(|&a, &b| hits(a).cmp(&hits(b)).then(b.cmp(&a))).unwrap();
        if ola_select(&nn, &labels, &table) != best {
            f.push(format!("ola trial {trial}"));
        }
        if f.len() > 5 {
            break;
        }
    }

    // hand-built toys
    // two regions on a line: model 1 perfect on x < 5, model 0 perfect on x >= 5
    let labels: Vec<usize> = (0..10).map(|i| i % 2).collect();
    let rows: Vec<Vec<usize>> = (0..10)
        .map(|i| {
            let y = i % 2;
            if i < 5 {
                vec![1 - y, y]
            } else {
                vec![y, 1 - y]
            }
        })
        .collect();
    let table = PredictionTable::from_rows(&rows);
    let points: Vec<f64> = (0..10).map(f64::from).collect();
    let nn = autobagging::workflows::nearest_neighbors(&points, 1, &[1.2], 3);
    if ola_select(&nn, &labels, &table) != 1 {
        f.push("OLA two-region toy".into());
    }
    // k = |pool|: globally best model; all equal: model 0
    let all: Vec<usize> = (0..4).collect();
    let t = PredictionTable::from_rows(&[vec![1, 0], vec![0, 0], vec![0, 0], vec![0, 1]]);
    if ola_select(&all, &[0, 0, 0, 0], &t) != 0 {
        f.push("OLA tie toy".into());
    }
    let t = PredictionTable::from_rows(&[vec![1, 0], vec![0, 0], vec![0, 0], vec![0, 0]]);
    if ola_select(&all, &[0, 0, 0, 0], &t) != 1 {
        f.push("OLA whole-pool toy".into());
    }
    // models 1 and 3 (positions 0 and 2) right on both neighbors
    let t = PredictionTable::from_rows(&[vec![0, 0, 0], vec![1, 0, 1], vec![1, 1, 1]]);
    if knora_e_select(&[0, 1], &[0, 1, 0], &t) != vec![0, 2] {
        f.push("KNORA-E {1,3} toy".into());
    }
    // nobody right on the nearest neighbor: whole ensemble
    let t = PredictionTable::from_rows(&[vec![1, 1, 1], vec![1, 1, 1], vec![0, 0, 0]]);
    if knora_e_select(&[0, 1], &[0, 1, 0], &t) != vec![0, 1, 2] {
        f.push("KNORA-E fallback toy".into());
    }
    // a universal oracle is always selected
    let t = PredictionTable::from_rows(&[vec![0, 1], vec![1, 1], vec![0, 0]]);
    if !knora_e_select(&[2, 0, 1], &[0, 1, 0], &t).contains(&0) {
        f.push("KNORA-E universal oracle toy".into());
    }
    assert!(verdict(5, "dynamic integration", &f, "10^4 random trials match the oracle, toys exact"));
}

// ---------------------------------------------------------------- criterion 6

#[test]
fn criterion_06_ranker_numerics() {
    let mut f = Vec::new();
    let mut r = rng(606);
    let eps = 1e-5;
    for group in 0..50 {
        let n = r.gen_range(2..15);
        let s: Vec<f64> = (0..n).map(|_| gaussian(&mut r, 0.0, 2.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| f64::from(r.gen_range(0..4))).collect();
        let (g, h) = pairwise_gradients(&s, &y);
        let scale = g.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
        if g.iter().sum::<f64>().abs() > 1e-12 * scale {
            f.push(format!("group {group}: gradient sum {}", g.iter().sum::<f64>()));
        }
        for i in 0..n {
            let shifted = |d: f64| {
                let mut t = s.clone();
                t[i] += d;
                t
            };
            let fd_g = (pairwise_loss(&shifted(eps), &y) - pairwise_loss(&shifted(-eps), &y)) / (2.0 * eps);
            let fd_h = (pairwise_gradients(&shifted(eps), &y).0[i] - pairwise_gradients(&shifted(-eps), &y).0[i]) / (2.0 * eps);
            let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(a.abs()).max(1e-6);
            if rel(g[i], fd_g) > 1e-4 && (g[i] - fd_g).abs() > 1e-9 {
                f.push(format!("group {group} item {i}: g {} vs {fd_g}", g[i]));
            }
            if rel(h[i], fd_h) > 1e-4 && (h[i] - fd_h).abs() > 1e-9 {
                f.push(format!("group {group} item {i}: h {} vs {fd_h}", h[i]));
            }
        }
    }

    // loss over 200 rounds on the desk-suite meta-dataset
    let e2e = end_to_end();
    let meta = MetaDataset::load(&e2e.out_w1).unwrap();
    let (_, report) = GBRanker::train_with_report(&meta, RankerConfig::default()).unwrap();
    if report.losses.len() != 201 {
        f.push(format!("{} loss entries", report.losses.len()));
    }
    for (i, w) in report.losses.windows(2).enumerate() {
        if w[1] > w[0] * (1.0 + 1e-12) {
            f.push(format!("loss rose at round {}: {} -> {}", i + 1, w[0], w[1]));
        }
    }

    // planted monotone signal: relevance follows feature 0 within each group
    let planted = |n_groups: usize, seed: u64| {
        let mut r = rng(seed);
        let groups = (0..n_groups)
            .map(|gi| {
                let xs: Vec<f64> = (0..30).map(|_| r.gen_range(0.0..1.0)).collect();
                let ranks = tie_averaged_ranks(&xs);
                MetaGroup {
                    dataset_id: format!("g{gi:03}"),
                    examples: xs
                        .iter()
                        .zip(&ranks)
                        .enumerate()
                        .map(|(i, (&x, &rank))| MetaExample {
                            workflow_id: format!("w{i:02}"),
                            x: vec![Some(x), Some(r.gen_range(0.0..1.0)), Some(r.gen_range(0.0..1.0))],
                            rank,
                            relevance: 31 - rank.ceil() as u32,
                        })
                        .collect(),
                }
            })
            .collect();
        MetaDataset {
            feature_names: vec!["signal".into(), "noise_a".into(), "noise_b".into()],
            groups,
        }
    };
    let model = GBRanker::train(&planted(20, 1), RankerConfig::default()).unwrap();
    let fresh = planted(10, 2);
    let mut worst = f64::INFINITY;
    for g in &fresh.groups {
        let scores: Vec<f64> = g.examples.iter().map(|e| model.score(&e.x)).collect();
        let truth: Vec<f64> = g.examples.iter().map(|e| e.x[0].unwrap()).collect();
        worst = worst.min(kendall_tau(&scores, &truth));
    }
    if worst < 0.9 {
        f.push(format!("planted signal: worst held-out group tau {worst:.3}"));
    }
    assert!(verdict(
        6,
        "ranker numerics",
        &f,
        &format!(
            "50 groups match finite differences, loss {:.1} -> {:.1} monotone, planted tau >= {worst:.3}",
            report.losses[0],
            report.losses[report.losses.len() - 1]
        )
    ));
}

// ---------------------------------------------------------------- criterion 7

/// Rows reaching every split node, collected by walking the tree.
fn check_node(
    node: &RegNode,
    rows: &[usize],
    cols: &[Vec<Option<f64>>],
    g: &[f64],
    h: &[f64],
    p: TreeGrowth,
    f: &mut Vec<String>,
    nodes: &mut usize,
) {
    let RegNode::Split {
        feature,
        threshold,
        default_left,
        gain,
        left,
        right,
    } = node
    else {
        return;
    };
    *nodes += 1;
    let col = &cols[*feature];
    let stats = |to_left_missing: bool| {
        let (mut gl, mut hl, mut gr, mut hr) = (0.0, 0.0, 0.0, 0.0);
        for &r in rows {
            let left = match col[r] {
                Some(v) => v < *threshold,
                None => to_left_missing,
            };
            if left {
                gl += g[r];
                hl += h[r];
            } else {
                gr += g[r];
                hr += h[r];
            }
        }
        (gl, hl, gr, hr)
    };
    // brute force over both directions for the stored split
    let feasible_gain = |dl: bool| {
        let (gl, hl, gr, hr) = stats(dl);
        (hl >= p.min_child_weight && hr >= p.min_child_weight).then(|| split_gain(gl, hl, gr, hr, p.lambda))
    };
    let (gain_l, gain_r) = (feasible_gain(true), feasible_gain(false));
    let brute_left = match (gain_l, gain_r) {
        (Some(a), Some(b)) => a >= b - 1e-12,
        (Some(_), None) => true,
        (None, Some(_)) => false,
        (None, None) => {
            f.push("stored split infeasible".into());
            return;
        }
    };
    if brute_left != *default_left {
        f.push(format!("node on feature {feature} at {threshold}: stored left={default_left}, brute force left={brute_left}"));
    }
    let brute_gain = if brute_left { gain_l } else { gain_r }.unwrap();
    if (brute_gain - gain).abs() > 1e-9 * (1.0 + gain.abs()) {
        f.push(format!("node gain {gain} vs brute force {brute_gain}"));
    }
    // and no other (feature, threshold, direction) beats it
    for (fi, c) in cols.iter().enumerate() {
        let mut vals: Vec<f64> = rows.iter().filter_map(|&r| c[r]).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        for w in vals.windows(2) {
            let t = w[0] + (w[1] - w[0]) / 2.0;
            for dl in [true, false] {
                let (mut gl, mut hl, mut gr, mut hr) = (0.0, 0.0, 0.0, 0.0);
                for &r in rows {
                    if c[r].map_or(dl, |v| v < t) {
                        gl += g[r];
                        hl += h[r];
                    } else {
                        gr += g[r];
                        hr += h[r];
                    }
                }
                if hl >= p.min_child_weight && hr >= p.min_child_weight {
                    let other = split_gain(gl, hl, gr, hr, p.lambda);
                    if other > gain + 1e-9 * (1.0 + gain.abs()) {
                        f.push(format!("feature {fi} at {t} beats stored split: {other} > {gain}"));
                    }
                }
            }
        }
    }
    let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| col[i].map_or(*default_left, |v| v < *threshold));
    check_node(left, &l, cols, g, h, p, f, nodes);
    check_node(right, &r, cols, g, h, p, f, nodes);
}

#[test]
fn criterion_07_missing_value_routing() {
    let mut f = Vec::new();
    let mut r = rng(707);
    let mut nodes = 0;
    let mut with_missing = 0;
    for _ in 0..300 {
        let n = r.gen_range(4..=20);
        let n_features = r.gen_range(1..4);
        let cols: Vec<Vec<Option<f64>>> = (0..n_features)
            .map(|_| {
                (0..n)
                    .map(|_| (!r.gen_bool(0.3)).then(|| f64::from(r.gen_range(0..6))))
                    .collect()
            })
            .collect();
        let g: Vec<f64> = (0..n).map(|_| gaussian(&mut r, 0.0, 1.0)).collect();
        let h: Vec<f64> = (0..n).map(|_| r.gen_range(0.05..1.0)).collect();
        let growth = TreeGrowth {
            max_depth: 3,
            min_child_weight: r.gen_range(0.0..0.8),
            lambda: 1.0,
        };
        let x = FeatureMatrix::new(&cols);
        let tree = autobagging::ranker::fit_tree_to_gradients(&x, &g, &h, &vec![true; n], growth);
        if cols.iter().flatten().any(Option::is_none) {
            with_missing += 1;
        }
        let rows: Vec<usize> = (0..n).collect();
        check_node(&tree.root, &rows, &cols, &g, &h, growth, &mut f, &mut nodes);
    }
    assert!(verdict(
        7,
        "missing-value routing",
        &f,
        &format!("{nodes} split nodes on 300 toys ({with_missing} with missing values) match brute force")
    ));
}

// ---------------------------------------------------------------- criterion 8

#[test]
fn criterion_08_desk_scale_end_to_end() {
    let e2e = end_to_end();
    let mut f = Vec::new();
    if e2e.eligible < 12 {
        f.push(format!("{} eligible datasets", e2e.eligible));
    }
    let perf = PerformanceTable::load(e2e.out_w1.join("performance.csv")).unwrap();
    let ids = perf.dataset_ids();
    if perf.len() != ids.len() * 63 || ids.len() != e2e.eligible {
        f.push(format!("{} records for {} datasets", perf.len(), ids.len()));
    }
    if perf.records().iter().any(|r| r.fold_kappas.len() != 4) {
        f.push("records without 4 folds".into());
    }
    if e2e.elapsed > Duration::from_secs(3600) {
        f.push(format!("took {:?}", e2e.elapsed));
    }
    for a in &e2e.report.audit {
        if !a.passed {
            f.push(format!("audit {}: {}", a.name, a.detail));
        }
    }
    assert!(verdict(
        8,
        "desk-scale end-to-end",
        &f,
        &format!(
            "{} datasets x 63 x 4 folds, all {} audits pass, {:.0?} on {} worker",
            ids.len(),
            e2e.report.audit.len(),
            e2e.elapsed,
            1
        )
    ));
}

// ---------------------------------------------------------------- criterion 9

#[test]
fn criterion_09_directional_trend() {
    let e2e = end_to_end();
    let mut f = Vec::new();
    let r = &e2e.report;
    let (la, lb) = (r.loss_at("autoBagging", 1).unwrap(), r.loss_at("average_rank", 1).unwrap());
    if la > lb {
        f.push(format!("desk suite loss@1 autoBagging {la:.4} > average rank {lb:.4}"));
    }
    if r.map_autobagging < r.map_average_rank {
        f.push(format!(
            "desk suite MAP@10 autoBagging {:.4} < average rank {:.4}",
            r.map_autobagging, r.map_average_rank
        ));
    }
    let (meta, perf) = planted_metadata(20, 3, SEED).unwrap();
    let folds = lodo_fixed(&meta, &perf, RankerConfig::default()).unwrap();
    let p = benchmark(folds, &perf, BenchmarkOptions::default()).unwrap();
    let gap = p.map_autobagging - p.map_average_rank;
    if gap < 0.1 {
        f.push(format!("planted MAP gap {gap:.3} < 0.1"));
    }
    let (pa, pb) = (p.loss_at("autoBagging", 1).unwrap(), p.loss_at("average_rank", 1).unwrap());
    if pa > pb {
        f.push(format!("planted loss@1 autoBagging {pa:.4} > average rank {pb:.4}"));
    }
    assert!(verdict(
        9,
        "directional trend",
        &f,
        &format!(
            "desk MAP {:.3} vs {:.3}, loss@1 {la:.4} vs {lb:.4}; planted MAP gap {gap:.3}, loss@1 {pa:.4} vs {pb:.4}",
            r.map_autobagging, r.map_average_rank
        )
    ));
}

// ---------------------------------------------------------------- criterion 10

fn files(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(files(&p));
        } else {
            out.push(p);
        }
    }
    out.sort();
    out
}

#[test]
fn criterion_10_reproducibility() {
    let e2e = end_to_end();
    let mut f = Vec::new();
    let a = files(&e2e.out_w1);
    let b = files(&e2e.out_w4);
    let rel = |v: &[PathBuf], root: &Path| -> Vec<PathBuf> { v.iter().map(|p| p.strip_prefix(root).unwrap().to_path_buf()).collect() };
    if rel(&a, &e2e.out_w1) != rel(&b, &e2e.out_w4) {
        f.push("different file sets".into());
    }
    let mut compared = 0;
    for (x, y) in a.iter().zip(&b) {
        let ext = x.extension().and_then(|e| e.to_str()).unwrap_or("");
        if ext != "csv" && ext != "json" {
            continue;
        }
        compared += 1;
        if std::fs::read(x).unwrap() != std::fs::read(y).unwrap() {
            f.push(format!("{} differs", x.strip_prefix(&e2e.out_w1).unwrap().display()));
        }
    }
    assert!(verdict(
        10,
        "reproducibility",
        &f,
        &format!("{compared} CSV/JSON files byte-identical between 1 and 4 workers")
    ));
}
