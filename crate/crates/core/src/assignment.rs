//! Rectangular linear assignment (Hungarian method, shortest augmenting
//! paths with dual potentials, O(n^2 m) for n <= m).

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// A row-major dense cost matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::param("cost", "data length does not match shape"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != cols) {
            return Err(Error::param("cost", "ragged rows"));
        }
        Ok(Self::from_fn(rows.len(), cols, |r, c| rows[r].as_ref()[c]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }
}

/// An optimal partial assignment of size `min(rows, cols)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    /// `(row, col)` pairs sorted by row.
    pub pairs: Vec<(usize, usize)>,
    pub total_cost: f64,
}

/// Minimum-cost assignment of `min(rows, cols)` pairs.
///
/// Among optimal assignments the one whose row-sorted pair list is
/// lexicographically smallest is returned. Costs within a relative `1e-12`
/// of each other count as tied.
pub fn hungarian(cost: &CostMatrix) -> Result<Matching> {
    if cost.data.iter().any(|c| !c.is_finite()) {
        return Err(Error::param("cost", "all costs must be finite"));
    }
    let (n, m) = (cost.rows, cost.cols);
    if n == 0 || m == 0 {
        return Ok(Matching {
            pairs: Vec::new(),
            total_cost: 0.0,
        });
    }
    let transposed = n > m;
    let at = |i: usize, j: usize| if transposed { cost.get(j, i) } else { cost.get(i, j) };
    let (sn, sm) = if transposed { (m, n) } else { (n, m) };
    let (solved, duals) = solve(sn, sm, at);
    let scale = cost.data.iter().fold(0.0f64, |a, c| a.max(c.abs()));
    let tol = 1e-12 * (1.0 + scale);
    let to_original = |(i, j): (usize, usize)| if transposed { (j, i) } else { (i, j) };
    let mut pairs: Vec<(usize, usize)> = match lex_smallest(sn, sm, at, &duals, transposed, tol) {
        Some(p) => p.into_iter().map(to_original).collect(),
        None => solved.into_iter().map(to_original).collect(),
    };
    pairs.sort_unstable();
    let total_cost = pairs.iter().map(|&(r, c)| cost.get(r, c)).sum();
    Ok(Matching { pairs, total_cost })
}

/// Dual potentials of a solved problem, 1-based as in [`solve`].
struct Duals {
    u: Vec<f64>,
    v: Vec<f64>,
}

/// Assigns every one of `n` rows to a distinct column out of `m >= n`.
fn solve(n: usize, m: usize, cost: impl Fn(usize, usize) -> f64) -> (Vec<(usize, usize)>, Duals) {
    // 1-based with column 0 as the virtual root
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    let mut minv = vec![0.0f64; m + 1];
    let mut used = vec![false; m + 1];

    for row in 1..=n {
        owner[0] = row;
        let mut j0 = 0usize;
        minv.fill(f64::INFINITY);
        used.fill(false);
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let reduced = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let pairs = (1..=m)
        .filter(|&j| owner[j] != 0)
        .map(|j| (owner[j] - 1, j - 1))
        .collect();
    (pairs, Duals { u, v })
}

/// Kuhn's augmenting-path matching from every `active` left vertex over
/// `adj` restricted to `right_ok`; true when all of them get matched.
fn covers(adj: &[Vec<usize>], active: &[bool], right_ok: &[bool], n_right: usize) -> bool {
    fn augment(
        l: usize,
        adj: &[Vec<usize>],
        right_ok: &[bool],
        seen: &mut [bool],
        mate: &mut [usize],
    ) -> bool {
        for &r in &adj[l] {
            if !right_ok[r] || seen[r] {
                continue;
            }
            seen[r] = true;
            if mate[r] == usize::MAX || augment(mate[r], adj, right_ok, seen, mate) {
                mate[r] = l;
                return true;
            }
        }
        false
    }
    let mut mate = vec![usize::MAX; n_right];
    let mut seen = vec![false; n_right];
    for l in 0..adj.len() {
        if !active[l] {
            continue;
        }
        seen.fill(false);
        if !augment(l, adj, right_ok, &mut seen, &mut mate) {
            return false;
        }
    }
    true
}

/// The lexicographically smallest optimal matching, in solver orientation.
///
/// A matching is optimal iff it uses only tight edges (zero reduced cost
/// under `duals`), covers every row and covers every column with a nonzero
/// potential. Pairs are fixed greedily in original row order; a candidate is
/// kept when the rest can still be completed, which by the
/// Mendelsohn-Dulmage theorem holds iff the free rows and the free required
/// columns can each be covered on their own.
fn lex_smallest(
    n: usize,
    m: usize,
    cost: impl Fn(usize, usize) -> f64,
    duals: &Duals,
    transposed: bool,
    tol: f64,
) -> Option<Vec<(usize, usize)>> {
    let mut row_adj = vec![Vec::new(); n];
    let mut col_adj = vec![Vec::new(); m];
    for i in 0..n {
        for j in 0..m {
            if cost(i, j) - duals.u[i + 1] - duals.v[j + 1] <= tol {
                row_adj[i].push(j);
                col_adj[j].push(i);
            }
        }
    }
    let required: Vec<bool> = (0..m).map(|j| duals.v[j + 1] < 0.0).collect();
    let mut row_free = vec![true; n];
    let mut col_free = vec![true; m];

    let feasible = |row_free: &[bool], col_free: &[bool]| {
        let cols_needed: Vec<bool> = (0..m).map(|j| col_free[j] && required[j]).collect();
        covers(&row_adj, row_free, col_free, m) && covers(&col_adj, &cols_needed, row_free, n)
    };
    if !feasible(&row_free, &col_free) {
        return None;
    }

    let mut pairs = Vec::with_capacity(n);
    // original rows are solver rows, or solver columns when transposed
    let outer = if transposed { m } else { n };
    for r in 0..outer {
        let candidates: Vec<(usize, usize)> = if transposed {
            let mut c: Vec<usize> = col_adj[r].iter().copied().filter(|&i| row_free[i]).collect();
            c.sort_unstable();
            c.into_iter().map(|i| (i, r)).collect()
        } else {
            row_adj[r].iter().copied().filter(|&j| col_free[j]).map(|j| (r, j)).collect()
        };
        let mut placed = false;
        for (i, j) in candidates {
            row_free[i] = false;
            col_free[j] = false;
            if feasible(&row_free, &col_free) {
                pairs.push((i, j));
                placed = true;
                break;
            }
            row_free[i] = true;
            col_free[j] = true;
        }
        if !placed && transposed {
            // no optimal matching uses this column
            col_free[r] = false;
        }
    }
    (pairs.len() == n).then_some(pairs)
}
