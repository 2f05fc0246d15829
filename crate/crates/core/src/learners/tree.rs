//! CART classification trees grown greedily on Gini impurity.

use serde::{Deserialize, Serialize};

use super::{argmax_first, Predictor};
use crate::dataset::{ColumnValues, Dataset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeParams {
    /// `None` grows until purity or `min_leaf` stops it.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
}

impl TreeParams {
    /// Bagging members: unlimited depth, two rows per leaf.
    pub const BAGGING: TreeParams = TreeParams {
        max_depth: None,
        min_leaf: 2,
    };

    pub fn depth(depth: usize) -> Self {
        TreeParams {
            max_depth: Some(depth),
            min_leaf: 1,
        }
    }
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams::BAGGING
    }
}

/// Numeric rows with `x <= t` go left; categorical rows equal to the code go left.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitRule {
    Threshold(f64),
    Category(u32),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeNode {
    Leaf {
        class: usize,
        distribution: Vec<f64>,
    },
    Split {
        feature: usize,
        rule: SplitRule,
        /// Missing values follow the branch that held more training rows.
        missing_left: bool,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Split { left, right, .. } => left.leaf_count() + right.leaf_count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub root: TreeNode,
}

impl DecisionTree {
    pub fn predict(&self, d: &Dataset, row: usize) -> usize {
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf { class, .. } => return *class,
                TreeNode::Split {
                    feature,
                    rule,
                    missing_left,
                    left,
                    right,
                } => {
                    let goes_left = match (&d.columns[*feature].values, rule) {
                        (ColumnValues::Numeric(v), SplitRule::Threshold(t)) => {
                            v[row].map_or(*missing_left, |x| x <= *t)
                        }
                        (ColumnValues::Categorical { codes, .. }, SplitRule::Category(c)) => {
                            codes[row].map_or(*missing_left, |x| x == *c)
                        }
                        _ => panic!("tree applied to a dataset with a different schema"),
                    };
                    node = if goes_left { left } else { right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }
}

/// Gini impurity scaled by node size: `n - sum(c^2) / n`.
pub(crate) fn weighted_gini(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let sq: f64 = counts.iter().map(|&c| (c * c) as f64).sum();
    n as f64 - sq / n as f64
}

struct Candidate {
    feature: usize,
    rule: SplitRule,
    missing_left: bool,
    decrease: f64,
}

// Improvements smaller than this are treated as ties, so the earlier
// (lower feature, lower threshold) candidate wins.
const TIE_EPS: f64 = 1e-12;

struct Grower<'a> {
    d: &'a Dataset,
    params: TreeParams,
    n_classes: usize,
}

impl Grower<'_> {
    fn leaf(&self, counts: &[usize]) -> TreeNode {
        let n: usize = counts.iter().sum();
        TreeNode::Leaf {
            class: argmax_first(counts),
            distribution: counts.iter().map(|&c| c as f64 / n as f64).collect(),
        }
    }

    fn grow(&self, rows: &[usize], depth: usize) -> TreeNode {
        let counts = self.d.class_counts(rows);
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let depth_reached = self.params.max_depth.is_some_and(|m| depth >= m);
        if pure || depth_reached || rows.len() < 2 * self.params.min_leaf.max(1) {
            return self.leaf(&counts);
        }
        let Some(best) = self.best_split(rows, &counts) else {
            return self.leaf(&counts);
        };
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&r| self.goes_left(best.feature, best.rule, best.missing_left, r));
        TreeNode::Split {
            feature: best.feature,
            rule: best.rule,
            missing_left: best.missing_left,
            left: Box::new(self.grow(&left_rows, depth + 1)),
            right: Box::new(self.grow(&right_rows, depth + 1)),
        }
    }

    fn goes_left(&self, feature: usize, rule: SplitRule, missing_left: bool, r: usize) -> bool {
        match (&self.d.columns[feature].values, rule) {
            (ColumnValues::Numeric(v), SplitRule::Threshold(t)) => v[r].map_or(missing_left, |x| x <= t),
            (ColumnValues::Categorical { codes, .. }, SplitRule::Category(c)) => {
                codes[r].map_or(missing_left, |x| x == c)
            }
            _ => unreachable!(),
        }
    }

    fn consider(
        &self,
        best: &mut Option<Candidate>,
        parent: f64,
        left: &[usize],
        right: &[usize],
        missing: &[usize],
        feature: usize,
        rule: SplitRule,
    ) {
        let n_left: usize = left.iter().sum();
        let n_right: usize = right.iter().sum();
        let missing_left = n_left >= n_right;
        let n_missing: usize = missing.iter().sum();
        let (size_l, size_r) = if missing_left {
            (n_left + n_missing, n_right)
        } else {
            (n_left, n_right + n_missing)
        };
        if size_l < self.params.min_leaf.max(1) || size_r < self.params.min_leaf.max(1) {
            return;
        }
        let decrease = if n_missing == 0 {
            parent - weighted_gini(left) - weighted_gini(right)
        } else {
            let merged: Vec<usize> = if missing_left { left } else { right }
                .iter()
                .zip(missing)
                .map(|(a, b)| a + b)
                .collect();
            if missing_left {
                parent - weighted_gini(&merged) - weighted_gini(right)
            } else {
                parent - weighted_gini(left) - weighted_gini(&merged)
            }
        };
        if best.as_ref().is_none_or(|b| decrease > b.decrease + TIE_EPS) {
            *best = Some(Candidate {
                feature,
                rule,
                missing_left,
                decrease,
            });
        }
    }

    fn best_split(&self, rows: &[usize], counts: &[usize]) -> Option<Candidate> {
        let parent = weighted_gini(counts);
        let k = self.n_classes;
        let mut best: Option<Candidate> = None;
        for (feature, col) in self.d.columns.iter().enumerate() {
            let mut missing = vec![0usize; k];
            match &col.values {
                ColumnValues::Numeric(v) => {
                    let mut entries: Vec<(f64, usize)> = Vec::with_capacity(rows.len());
                    for &r in rows {
                        match v[r] {
                            Some(x) => entries.push((x, self.d.target[r])),
                            None => missing[self.d.target[r]] += 1,
                        }
                    }
                    if entries.len() < 2 {
                        continue;
                    }
                    entries.sort_by(|a, b| a.0.total_cmp(&b.0));
                    let mut total = vec![0usize; k];
                    for &(_, c) in &entries {
                        total[c] += 1;
                    }
                    let mut left = vec![0usize; k];
                    let mut right = total;
                    for i in 0..entries.len() - 1 {
                        let (x, c) = entries[i];
                        left[c] += 1;
                        right[c] -= 1;
                        let next = entries[i + 1].0;
                        if next > x {
                            let t = x + (next - x) / 2.0;
                            self.consider(
                                &mut best,
                                parent,
                                &left,
                                &right,
                                &missing,
                                feature,
                                SplitRule::Threshold(t),
                            );
                        }
                    }
                }
                ColumnValues::Categorical { levels, codes } => {
                    let mut per_level = vec![vec![0usize; k]; levels.len()];
                    let mut total = vec![0usize; k];
                    for &r in rows {
                        let c = self.d.target[r];
                        match codes[r] {
                            Some(code) => {
                                per_level[code as usize][c] += 1;
                                total[c] += 1;
                            }
                            None => missing[c] += 1,
                        }
                    }
                    let n_total: usize = total.iter().sum();
                    for (code, level_counts) in per_level.iter().enumerate() {
                        let n_level: usize = level_counts.iter().sum();
                        if n_level == 0 || n_level == n_total {
                            continue;
                        }
                        let right: Vec<usize> =
                            total.iter().zip(level_counts).map(|(t, l)| t - l).collect();
                        self.consider(
                            &mut best,
                            parent,
                            level_counts,
                            &right,
                            &missing,
                            feature,
                            SplitRule::Category(code as u32),
                        );
                    }
                }
            }
        }
        best
    }
}

/// Grows a CART tree on `rows` (duplicates allowed, as in a bootstrap sample).
pub fn fit_tree(d: &Dataset, rows: &[usize], params: TreeParams) -> DecisionTree {
    assert!(!rows.is_empty(), "tree needs at least one row");
    let grower = Grower {
        d,
        params,
        n_classes: d.n_classes(),
    };
    DecisionTree {
        root: grower.grow(rows, 0),
    }
}

/// Depth-limited tree used as a landmarker.
pub fn fit_stump(d: &Dataset, rows: &[usize], depth: usize) -> Predictor {
    Predictor::Tree(fit_tree(d, rows, TreeParams::depth(depth)))
}
