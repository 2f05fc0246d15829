//! Maximal information coefficient, approximated the MINE way: for each row
//! count, equipartition one axis and choose the other axis's partition by
//! dynamic programming over clump boundaries, then take the best normalized
//! mutual information over all grids with `rows * cols <= n^alpha`.

/// Grid-search parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MicParams {
    /// Grid size bound exponent: `rows * cols <= n^alpha`.
    pub alpha: f64,
    /// Clump factor: at most `c * cols` superclumps enter the search.
    pub c: usize,
}

impl Default for MicParams {
    fn default() -> Self {
        MicParams { alpha: 0.6, c: 15 }
    }
}

fn is_constant(v: &[f64]) -> bool {
    v.iter().all(|&x| x == v[0])
}

/// MIC of the jointly non-missing pairs; `None` with fewer than 4 pairs or a
/// constant side.
pub fn mic(x: &[Option<f64>], y: &[Option<f64>]) -> Option<f64> {
    mic_with(x, y, MicParams::default())
}

pub fn mic_with(x: &[Option<f64>], y: &[Option<f64>], params: MicParams) -> Option<f64> {
    assert_eq!(x.len(), y.len(), "mic needs equal lengths");
    let (xs, ys): (Vec<f64>, Vec<f64>) = x
        .iter()
        .zip(y)
        .filter_map(|(a, b)| Some(((*a)?, (*b)?)))
        .unzip();
    let n = xs.len();
    if n < 4 || is_constant(&xs) || is_constant(&ys) {
        return None;
    }
    let b = ((n as f64).powf(params.alpha).floor() as usize).max(4);
    let m = char_max(&xs, &ys, b, params.c).max(char_max(&ys, &xs, b, params.c));
    Some(m.clamp(0.0, 1.0))
}

/// Best normalized score with `y` equipartitioned into `q` rows and `x`
/// optimized, over all `q` and column counts allowed by `b`.
fn char_max(x: &[f64], y: &[f64], b: usize, c: usize) -> f64 {
    let n = x.len();
    let mut by_x: Vec<usize> = (0..n).collect();
    by_x.sort_by(|&i, &j| x[i].total_cmp(&x[j]).then(y[i].total_cmp(&y[j])));
    let mut by_y: Vec<usize> = (0..n).collect();
    by_y.sort_by(|&i, &j| y[i].total_cmp(&y[j]).then(x[i].total_cmp(&x[j])));

    let mut best = 0.0f64;
    for q in 2..=b / 2 {
        let max_cols = b / q;
        if max_cols < 2 {
            break;
        }
        let rows = equipartition(y, &by_y, q);
        let n_rows = rows.iter().copied().max().map_or(0, |r| r + 1);
        if n_rows < 2 {
            continue;
        }
        let scores = optimize_x_axis(x, &by_x, &rows, n_rows, max_cols, c);
        for (l, &mi) in scores.iter().enumerate() {
            let cols = l + 2;
            let norm = (cols.min(q) as f64).log2();
            best = best.max(mi / norm);
        }
    }
    best
}

/// Row index of every point when the sorted values are cut into `q` groups
/// of roughly equal size, never separating equal values.
fn equipartition(v: &[f64], order: &[usize], q: usize) -> Vec<usize> {
    let n = order.len();
    let mut rows = vec![0usize; n];
    let mut desired = n as f64 / q as f64;
    let mut row = 0usize;
    let mut current = 0usize;
    let mut i = 0;
    while i < n {
        let mut s = 1;
        while i + s < n && v[order[i + s]] == v[order[i]] {
            s += 1;
        }
        let with = (current as f64 + s as f64 - desired).abs();
        let without = (current as f64 - desired).abs();
        if current != 0 && with >= without && row + 1 < q {
            row += 1;
            current = 0;
            desired = (n - i) as f64 / (q - row) as f64;
        }
        for &p in &order[i..i + s] {
            rows[p] = row;
        }
        current += s;
        i += s;
    }
    rows
}

/// Splits the x-sorted points into clumps: maximal runs sharing a row, with
/// tied x values that straddle rows fused into a single clump. Returns the
/// per-row counts of every clump.
fn clumps(x: &[f64], by_x: &[usize], rows: &[usize], n_rows: usize) -> Vec<Vec<usize>> {
    // label per sorted position: the row, or a unique marker for mixed tie groups
    let n = by_x.len();
    let mut labels: Vec<isize> = Vec::with_capacity(n);
    let mut i = 0;
    let mut mixed = 0isize;
    while i < n {
        let mut j = i + 1;
        while j < n && x[by_x[j]] == x[by_x[i]] {
            j += 1;
        }
        let first = rows[by_x[i]];
        let same = by_x[i..j].iter().all(|&p| rows[p] == first);
        let label = if same {
            first as isize
        } else {
            mixed -= 1;
            mixed
        };
        labels.extend(std::iter::repeat_n(label, j - i));
        i = j;
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (pos, &p) in by_x.iter().enumerate() {
        if pos == 0 || labels[pos] != labels[pos - 1] {
            out.push(vec![0; n_rows]);
        }
        out.last_mut().expect("clump exists")[rows[p]] += 1;
    }
    out
}

/// Merges adjacent clumps into at most `k` superclumps of similar size.
fn superclumps(clumps: Vec<Vec<usize>>, k: usize) -> Vec<Vec<usize>> {
    if clumps.len() <= k {
        return clumps;
    }
    let sizes: Vec<usize> = clumps.iter().map(|c| c.iter().sum()).collect();
    let n: usize = sizes.iter().sum();
    let mut out: Vec<Vec<usize>> = Vec::with_capacity(k);
    let mut desired = n as f64 / k as f64;
    let mut current = 0usize;
    let mut consumed = 0usize;
    for (c, s) in clumps.into_iter().zip(sizes) {
        let with = (current as f64 + s as f64 - desired).abs();
        let without = (current as f64 - desired).abs();
        if out.is_empty() || (current != 0 && with >= without && out.len() < k) {
            if !out.is_empty() {
                desired = (n - consumed) as f64 / (k - out.len()) as f64;
            }
            out.push(vec![0; c.len()]);
            current = 0;
        }
        let last = out.last_mut().expect("superclump exists");
        for (a, b) in last.iter_mut().zip(&c) {
            *a += b;
        }
        current += s;
        consumed += s;
    }
    out
}

fn xlog2x(v: f64) -> f64 {
    if v > 0.0 {
        v * v.log2()
    } else {
        0.0
    }
}

/// Mutual information of the best partition of the x-axis into exactly
/// `l` columns, for `l = 2..=max_cols` (index `l - 2`). When fewer clumps
/// than `l` exist the best coarser partition is reported.
fn optimize_x_axis(
    x: &[f64],
    by_x: &[usize],
    rows: &[usize],
    n_rows: usize,
    max_cols: usize,
    c: usize,
) -> Vec<f64> {
    let parts = superclumps(clumps(x, by_x, rows, n_rows), c * max_cols);
    let k = parts.len();
    let n = by_x.len() as f64;

    // cumulative per-row counts over clump prefixes
    let mut cum = vec![vec![0usize; n_rows]; k + 1];
    for t in 0..k {
        for r in 0..n_rows {
            cum[t + 1][r] = cum[t][r] + parts[t][r];
        }
    }
    let row_totals = &cum[k];
    let h_rows = -row_totals.iter().map(|&c| xlog2x(c as f64 / n)).sum::<f64>();

    // cost(s, t): n_st/n * H(rows | points of clumps s..t), times n
    let cost = |s: usize, t: usize| -> f64 {
        let mut total = 0usize;
        let mut acc = 0.0;
        for r in 0..n_rows {
            let cnt = cum[t][r] - cum[s][r];
            total += cnt;
            acc += xlog2x(cnt as f64);
        }
        xlog2x(total as f64) - acc
    };
    let mut costs = vec![0.0f64; (k + 1) * (k + 1)];
    for s in 0..k {
        for t in s + 1..=k {
            costs[s * (k + 1) + t] = cost(s, t);
        }
    }
    let cst = |s: usize, t: usize| costs[s * (k + 1) + t];

    // f[t] = least total cost of splitting the first t clumps into `l` columns
    let mut f: Vec<f64> = (0..=k).map(|t| if t == 0 { f64::INFINITY } else { cst(0, t) }).collect();
    let mut out = Vec::with_capacity(max_cols.saturating_sub(1));
    let mut best_cost = f[k];
    for l in 2..=max_cols {
        let mut g = vec![f64::INFINITY; k + 1];
        for t in l..=k {
            for s in l - 1..t {
                let v = f[s] + cst(s, t);
                if v < g[t] {
                    g[t] = v;
                }
            }
        }
        f = g;
        if f[k].is_finite() && f[k] < best_cost {
            best_cost = f[k];
        }
        out.push((h_rows - best_cost / n).max(0.0));
    }
    out
}
