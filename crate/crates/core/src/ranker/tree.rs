//! Second-order regression trees fitted to gradient statistics, with a
//! learned default direction for missing values at every split.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegNode {
    Leaf {
        weight: f64,
    },
    Split {
        feature: usize,
        /// Present values `< threshold` go left.
        threshold: f64,
        default_left: bool,
        gain: f64,
        left: Box<RegNode>,
        right: Box<RegNode>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegTree {
    pub root: RegNode,
}

impl RegTree {
    pub fn predict(&self, x: &[Option<f64>]) -> f64 {
        let mut node = &self.root;
        loop {
            match node {
                RegNode::Leaf { weight } => return *weight,
                RegNode::Split {
                    feature,
                    threshold,
                    default_left,
                    left,
                    right,
                    ..
                } => {
                    let go_left = x[*feature].map_or(*default_left, |v| v < *threshold);
                    node = if go_left { left } else { right };
                }
            }
        }
    }

    /// Visits every split as `(feature, gain)`.
    pub fn splits(&self) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        let mut stack = vec![&self.root];
        while let Some(n) = stack.pop() {
            if let RegNode::Split {
                feature, gain, left, right, ..
            } = n
            {
                out.push((*feature, *gain));
                stack.push(right);
                stack.push(left);
            }
        }
        out
    }

    pub fn depth(&self) -> usize {
        fn d(n: &RegNode) -> usize {
            match n {
                RegNode::Leaf { .. } => 0,
                RegNode::Split { left, right, .. } => 1 + d(left).max(d(right)),
            }
        }
        d(&self.root)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeGrowth {
    pub max_depth: usize,
    pub min_child_weight: f64,
    pub lambda: f64,
}

const GAIN_TIE: f64 = 1e-12;

/// Split gain `1/2 [GL^2/(HL+l) + GR^2/(HR+l) - G^2/(H+l)]`.
pub fn split_gain(gl: f64, hl: f64, gr: f64, hr: f64, lambda: f64) -> f64 {
    let score = |g: f64, h: f64| g * g / (h + lambda);
    0.5 * (score(gl, hl) + score(gr, hr) - score(gl + gr, hl + hr))
}

pub fn leaf_weight(g: f64, h: f64, lambda: f64) -> f64 {
    -g / (h + lambda)
}

/// Column-major feature matrix with per-feature row orders by value.
pub struct FeatureMatrix<'a> {
    pub columns: &'a [Vec<Option<f64>>],
    sorted: Vec<Vec<usize>>,
}

impl<'a> FeatureMatrix<'a> {
    pub fn new(columns: &'a [Vec<Option<f64>>]) -> Self {
        let sorted = columns
            .iter()
            .map(|c| {
                let mut idx: Vec<usize> = (0..c.len()).filter(|&r| c[r].is_some()).collect();
                idx.sort_by(|&a, &b| c[a].unwrap().total_cmp(&c[b].unwrap()).then(a.cmp(&b)));
                idx
            })
            .collect();
        FeatureMatrix { columns, sorted }
    }

    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }
}

struct Best {
    feature: usize,
    threshold: f64,
    default_left: bool,
    gain: f64,
}

/// Fits one tree to `(g, h)` over the rows flagged in `active`.
pub fn fit_tree_to_gradients(x: &FeatureMatrix, g: &[f64], h: &[f64], active: &[bool], growth: TreeGrowth) -> RegTree {
    let rows: Vec<usize> = (0..x.n_rows()).filter(|&r| active[r]).collect();
    let mut member = vec![false; x.n_rows()];
    RegTree {
        root: grow(x, g, h, &rows, &mut member, 0, growth),
    }
}

fn grow(x: &FeatureMatrix, g: &[f64], h: &[f64], rows: &[usize], member: &mut [bool], depth: usize, p: TreeGrowth) -> RegNode {
    let gs: f64 = rows.iter().map(|&r| g[r]).sum();
    let hs: f64 = rows.iter().map(|&r| h[r]).sum();
    let leaf = RegNode::Leaf {
        weight: leaf_weight(gs, hs, p.lambda),
    };
    if depth >= p.max_depth || rows.len() < 2 {
        return leaf;
    }
    for &r in rows {
        member[r] = true;
    }
    let best = find_split(x, g, h, member, gs, hs, p);
    for &r in rows {
        member[r] = false;
    }
    let Some(best) = best else { return leaf };
    let col = &x.columns[best.feature];
    let (l, r): (Vec<usize>, Vec<usize>) = rows
        .iter()
        .partition(|&&i| col[i].map_or(best.default_left, |v| v < best.threshold));
    RegNode::Split {
        feature: best.feature,
        threshold: best.threshold,
        default_left: best.default_left,
        gain: best.gain,
        left: Box::new(grow(x, g, h, &l, member, depth + 1, p)),
        right: Box::new(grow(x, g, h, &r, member, depth + 1, p)),
    }
}

fn find_split(x: &FeatureMatrix, g: &[f64], h: &[f64], member: &[bool], gs: f64, hs: f64, p: TreeGrowth) -> Option<Best> {
    let mut best: Option<Best> = None;
    for (f, col) in x.columns.iter().enumerate() {
        let present: Vec<usize> = x.sorted[f].iter().copied().filter(|&r| member[r]).collect();
        if present.len() < 2 {
            continue;
        }
        let gp: f64 = present.iter().map(|&r| g[r]).sum();
        let hp: f64 = present.iter().map(|&r| h[r]).sum();
        let (gm, hm) = (gs - gp, hs - hp);
        let (mut gl, mut hl) = (0.0, 0.0);
        for w in 0..present.len() - 1 {
            let (a, b) = (col[present[w]].unwrap(), col[present[w + 1]].unwrap());
            gl += g[present[w]];
            hl += h[present[w]];
            if a == b {
                continue;
            }
            let mut t = a + (b - a) / 2.0;
            if t <= a {
                t = b;
            }
            for default_left in [true, false] {
                let (cgl, chl) = if default_left { (gl + gm, hl + hm) } else { (gl, hl) };
                let (cgr, chr) = (gs - cgl, hs - chl);
                if chl < p.min_child_weight || chr < p.min_child_weight {
                    continue;
                }
                let gain = split_gain(cgl, chl, cgr, chr, p.lambda);
                if gain > 0.0 && best.as_ref().is_none_or(|b| gain > b.gain + GAIN_TIE) {
                    best = Some(Best {
                        feature: f,
                        threshold: t,
                        default_left,
                        gain,
                    });
                }
            }
        }
    }
    best
}
