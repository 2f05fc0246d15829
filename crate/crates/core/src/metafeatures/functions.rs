//! Univariate and pairwise meta-functions, and the post-processors that
//! summarize a multiset of their values. Missing inputs are skipped;
//! undefined results come back as `None`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

// Relative tolerance under which a second moment counts as zero.
const ZERO_VARIANCE: f64 = 1e-24;

fn is_zero_spread(m2: f64, mean: f64) -> bool {
    m2 <= ZERO_VARIANCE * (1.0 + mean * mean)
}

/// Shannon entropy (bits) of the non-missing values.
pub fn entropy(values: &[Option<usize>]) -> Option<f64> {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    let mut n = 0usize;
    for v in values.iter().flatten() {
        *counts.entry(*v).or_default() += 1;
        n += 1;
    }
    if n == 0 {
        return None;
    }
    Some(entropy_of_counts(counts.values().copied(), n))
}

fn entropy_of_counts(counts: impl Iterator<Item = usize>, n: usize) -> f64 {
    let n = n as f64;
    let mut counts: Vec<usize> = counts.filter(|&c| c > 0).collect();
    counts.sort_unstable();
    let h: f64 = counts
        .iter()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum();
    h.max(0.0)
}

/// Mutual information (bits) over jointly non-missing pairs.
pub fn mutual_information(a: &[Option<usize>], b: &[Option<usize>]) -> Option<f64> {
    assert_eq!(a.len(), b.len(), "mutual information needs equal lengths");
    let mut joint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut ma: BTreeMap<usize, usize> = BTreeMap::new();
    let mut mb: BTreeMap<usize, usize> = BTreeMap::new();
    let mut n = 0usize;
    for (x, y) in a.iter().zip(b) {
        if let (Some(x), Some(y)) = (x, y) {
            *joint.entry((*x, *y)).or_default() += 1;
            *ma.entry(*x).or_default() += 1;
            *mb.entry(*y).or_default() += 1;
            n += 1;
        }
    }
    if n == 0 {
        return None;
    }
    let ha = entropy_of_counts(ma.into_values(), n);
    let hb = entropy_of_counts(mb.into_values(), n);
    let hab = entropy_of_counts(joint.into_values(), n);
    Some((ha + hb - hab).max(0.0))
}

fn present(values: &[Option<f64>]) -> Vec<f64> {
    values.iter().flatten().copied().collect()
}

/// Moment skewness `m3 / m2^1.5` with population moments.
pub fn skewness(values: &[Option<f64>]) -> Option<f64> {
    let v = present(values);
    if v.len() < 3 {
        return None;
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let m2 = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    if is_zero_spread(m2, mean) {
        return None;
    }
    let m3 = v.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n;
    Some(m3 / m2.powf(1.5))
}

fn joint(x: &[Option<f64>], y: &[Option<f64>]) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(x.len(), y.len(), "paired inputs need equal lengths");
    x.iter()
        .zip(y)
        .filter_map(|(a, b)| Some(((*a)?, (*b)?)))
        .unzip()
}

/// Pearson product-moment correlation over jointly non-missing pairs.
pub fn pearson(x: &[Option<f64>], y: &[Option<f64>]) -> Option<f64> {
    let (xs, ys) = joint(x, y);
    if xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in xs.iter().zip(&ys) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if is_zero_spread(sxx / n, mx) || is_zero_spread(syy / n, my) {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Between-group over total sum of squares of `x` grouped by `groups`.
pub fn eta_squared(x: &[Option<f64>], groups: &[Option<usize>]) -> Option<f64> {
    assert_eq!(x.len(), groups.len());
    let mut by_group: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    let mut vals = Vec::new();
    for (v, g) in x.iter().zip(groups) {
        if let (Some(v), Some(g)) = (v, g) {
            let e = by_group.entry(*g).or_insert((0.0, 0));
            e.0 += v;
            e.1 += 1;
            vals.push((*v, *g));
        }
    }
    if by_group.len() < 2 {
        return None;
    }
    let n = vals.len() as f64;
    let mean = vals.iter().map(|(v, _)| v).sum::<f64>() / n;
    let sst: f64 = vals.iter().map(|(v, _)| (v - mean).powi(2)).sum();
    if is_zero_spread(sst / n, mean) {
        return None;
    }
    let ssb: f64 = by_group
        .values()
        .map(|(sum, cnt)| {
            let gm = sum / *cnt as f64;
            *cnt as f64 * (gm - mean).powi(2)
        })
        .sum();
    Some((ssb / sst).clamp(0.0, 1.0))
}

/// Summary of a multiset of meta-function values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PostProcessor {
    Identity,
    Avg,
    Max,
    Min,
    Sd,
    Var,
    /// Relative frequency in equal-width bin `bin` (1-based) of `bins`.
    Hist { bin: usize, bins: usize },
}

impl PostProcessor {
    pub fn suffix(&self) -> String {
        match self {
            PostProcessor::Identity => String::new(),
            PostProcessor::Avg => "avg".into(),
            PostProcessor::Max => "max".into(),
            PostProcessor::Min => "min".into(),
            PostProcessor::Sd => "sd".into(),
            PostProcessor::Var => "var".into(),
            PostProcessor::Hist { bin, .. } => format!("hist{bin}"),
        }
    }
}

/// Relative frequencies over `bins` equal-width bins spanning the observed
/// range; a constant multiset puts all its mass in the first bin.
pub fn histogram(values: &[f64], bins: usize) -> Option<Vec<f64>> {
    if values.is_empty() || bins == 0 {
        return None;
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut counts = vec![0usize; bins];
    if hi > lo {
        let width = (hi - lo) / bins as f64;
        for &v in values {
            let b = (((v - lo) / width).floor() as usize).min(bins - 1);
            counts[b] += 1;
        }
    } else {
        counts[0] = values.len();
    }
    Some(counts.iter().map(|&c| c as f64 / values.len() as f64).collect())
}

fn population_var(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n
}

/// Applies one post-processor. `Identity` expects a single value.
pub fn postprocess(values: &[f64], post: PostProcessor) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    match post {
        PostProcessor::Identity => (values.len() == 1).then(|| values[0]),
        PostProcessor::Avg => Some(values.iter().sum::<f64>() / values.len() as f64),
        PostProcessor::Max => values.iter().copied().reduce(f64::max),
        PostProcessor::Min => values.iter().copied().reduce(f64::min),
        PostProcessor::Var => (values.len() >= 2).then(|| population_var(values)),
        PostProcessor::Sd => (values.len() >= 2).then(|| population_var(values).sqrt()),
        PostProcessor::Hist { bin, bins } => histogram(values, bins).map(|h| h[bin - 1]),
    }
}
