//! Brute-force oracles and adversarial instance generators.
//!
//! Everything here is exhaustive and capped. These routines exist to check
//! the fast solvers, not to replace them.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Result, TropError};
use crate::matrix::{Semiring, TropicalMatrix};
use crate::pattern::equivalence_classes;
use crate::regression::{feasible_patterns, residual, Norm, RegressionProblem};

/// Largest grid `grid_oracle` will evaluate.
pub const GRID_POINT_CAP: u64 = 100_000_000;

/// Largest family size `has_binary_descent` will enumerate over.
pub const DESCENT_CAP: usize = 20;

fn axis_len(lo: f64, hi: f64, step: f64) -> u64 {
    ((hi - lo) / step + 1e-9).floor() as u64 + 1
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    a.iter()
        .zip(b)
        .find(|(u, v)| u != v)
        .is_some_and(|(u, v)| u < v)
}

/// Best point of the grid `lo_j + k·step` (within `hi_j`) on each
/// coordinate, by exhaustive evaluation.
///
/// Ties go to the lexicographically smallest point, so the result does not
/// depend on how the grid is split across threads.
pub fn grid_oracle(
    problem: &RegressionProblem,
    bounds: &[(f64, f64)],
    step: f64,
    norm: Norm,
) -> Result<(Vec<f64>, f64)> {
    let d = problem.d();
    if bounds.len() != d {
        return Err(TropError::DimensionMismatch(format!(
            "{} intervals for {d} coordinates",
            bounds.len()
        )));
    }
    if d > 4 {
        return Err(TropError::InvalidArgument(format!(
            "grid search supports d <= 4, got {d}"
        )));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(TropError::InvalidArgument(format!(
            "step must be positive, got {step}"
        )));
    }
    if bounds
        .iter()
        .any(|&(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo <= hi))
    {
        return Err(TropError::InvalidArgument(
            "grid box must be finite with lo <= hi".into(),
        ));
    }
    let lens: Vec<u64> = bounds
        .iter()
        .map(|&(lo, hi)| axis_len(lo, hi, step))
        .collect();
    let total = lens
        .iter()
        .try_fold(1u64, |acc, &l| acc.checked_mul(l))
        .filter(|&t| t <= GRID_POINT_CAP)
        .ok_or_else(|| TropError::CapExceeded(format!("grid exceeds {GRID_POINT_CAP} points")))?;
    let point = |mut idx: u64, x: &mut [f64]| {
        for j in (0..d).rev() {
            x[j] = bounds[j].0 + (idx % lens[j]) as f64 * step;
            idx /= lens[j];
        }
    };
    const CHUNK: u64 = 4096;
    let chunks = total.div_ceil(CHUNK);
    let best = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut x = vec![0.0; d];
            let mut best: Option<(f64, Vec<f64>)> = None;
            for idx in c * CHUNK..((c + 1) * CHUNK).min(total) {
                point(idx, &mut x);
                let r = residual(problem.a(), &x, problem.y(), norm).expect("shapes checked");
                if best
                    .as_ref()
                    .is_none_or(|(b, bx)| r < *b || (r == *b && lex_less(&x, bx)))
                {
                    best = Some((r, x.clone()));
                }
            }
            best.expect("non-empty chunk")
        })
        .reduce_with(|a, b| {
            if b.0 < a.0 || (b.0 == a.0 && lex_less(&b.1, &a.1)) {
                b
            } else {
                a
            }
        })
        .expect("non-empty grid");
    Ok((best.1, best.0))
}

/// Feasible-pattern counts bucketed by the number of `⋈_P` classes.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternCensus {
    pub n: usize,
    pub d: usize,
    pub total: usize,
    /// `k ↦ count`, for every `k` that occurs.
    pub counts: BTreeMap<usize, usize>,
}

impl PatternCensus {
    /// `(n+d-k-1)! / ((n-k)! (d-k)! (k-1)!)`, the general-position count of
    /// patterns with `k` classes; 0 when `k` is out of range.
    pub fn bound(&self, k: usize) -> u128 {
        census_bound(self.n, self.d, k)
    }
}

fn factorial(m: usize) -> u128 {
    (1..=m as u128).product()
}

pub fn census_bound(n: usize, d: usize, k: usize) -> u128 {
    if k == 0 || k > n || k > d {
        return 0;
    }
    factorial(n + d - k - 1) / (factorial(n - k) * factorial(d - k) * factorial(k - 1))
}

/// Enumerates all feasible patterns of `a` (same search and cap as the exact
/// solver) and counts them by class number.
pub fn pattern_census(a: &TropicalMatrix, cap: usize) -> Result<PatternCensus> {
    let patterns = feasible_patterns(a, cap)?;
    let mut counts = BTreeMap::new();
    for p in &patterns {
        *counts.entry(equivalence_classes(p).count()).or_insert(0) += 1;
    }
    Ok(PatternCensus {
        n: a.rows(),
        d: a.cols(),
        total: patterns.len(),
        counts,
    })
}

/// Maximum cycle mean by enumerating every simple cycle (max-plus, `n ≤ 8`).
///
/// Returns `-inf` for an acyclic matrix.
pub fn cycle_mean_by_enumeration(m: &TropicalMatrix) -> Result<f64> {
    let n = m.rows();
    if !m.is_square() || n > 8 {
        return Err(TropError::InvalidArgument(
            "need a square matrix with n <= 8".into(),
        ));
    }
    let w = if m.semiring() == Semiring::MaxPlus {
        m.clone()
    } else {
        m.negate_iso()
    };
    let mut best = f64::NEG_INFINITY;
    // Each simple cycle is visited from its smallest vertex.
    fn extend(
        w: &TropicalMatrix,
        start: usize,
        v: usize,
        len: usize,
        sum: f64,
        used: &mut [bool],
        best: &mut f64,
    ) {
        for u in start..w.rows() {
            let e = w.get(v, u);
            if e == f64::NEG_INFINITY {
                continue;
            }
            if u == start {
                *best = best.max((sum + e) / (len + 1) as f64);
            } else if !used[u] {
                used[u] = true;
                extend(w, start, u, len + 1, sum + e, used, best);
                used[u] = false;
            }
        }
    }
    let mut used = vec![false; n];
    for s in 0..n {
        used[s] = true;
        extend(&w, s, s, 0, 0.0, &mut used, &mut best);
        used[s] = false;
    }
    Ok(
        if m.semiring() == Semiring::MaxPlus || best == f64::NEG_INFINITY {
            best
        } else {
            -best
        },
    )
}

/// All-pairs shortest paths by per-source Bellman-Ford on a min-plus
/// weight matrix (`+inf` = no edge). Errors on a reachable negative cycle.
pub fn bellman_ford_closure(w: &TropicalMatrix) -> Result<TropicalMatrix> {
    if w.semiring() != Semiring::MinPlus || !w.is_square() {
        return Err(TropError::InvalidArgument(
            "need a square min-plus matrix".into(),
        ));
    }
    let n = w.rows();
    let mut out = Vec::with_capacity(n * n);
    for s in 0..n {
        let mut dist = vec![f64::INFINITY; n];
        dist[s] = 0.0;
        for round in 0..=n {
            let mut changed = false;
            for u in 0..n {
                if dist[u] == f64::INFINITY {
                    continue;
                }
                for v in 0..n {
                    let c = dist[u] + w.get(u, v);
                    if c < dist[v] {
                        dist[v] = c;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
            if round == n {
                return Err(TropError::NegativeCycle { vertex: s });
            }
        }
        out.extend(dist);
    }
    TropicalMatrix::new(n, n, out, Semiring::MinPlus)
}

/// Set-cover decision instance: can `k` members of `family` cover
/// `{1, …, n}`?
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetCoverInstance {
    n: usize,
    family: Vec<Vec<usize>>,
    k: usize,
}

impl SetCoverInstance {
    /// Requires `m ≥ 3`, `1 ≤ k < m`, elements in `1..=n` and a family whose
    /// union is the whole ground set.
    pub fn new(n: usize, family: Vec<Vec<usize>>, k: usize) -> Result<Self> {
        let m = family.len();
        if m < 3 || k == 0 || k >= m {
            return Err(TropError::InvalidArgument(format!(
                "need m >= 3 and 1 <= k < m, got m = {m}, k = {k}"
            )));
        }
        let mut covered = vec![false; n];
        for s in &family {
            for &e in s {
                if e == 0 || e > n {
                    return Err(TropError::InvalidArgument(format!(
                        "element {e} outside 1..={n}"
                    )));
                }
                covered[e - 1] = true;
            }
        }
        if !covered.iter().all(|&c| c) {
            return Err(TropError::InvalidArgument(
                "family does not cover the ground set".into(),
            ));
        }
        Ok(Self { n, family, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.family.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn family(&self) -> &[Vec<usize>] {
        &self.family
    }

    /// Smallest cover size, by exhaustive search.
    pub fn min_cover_size(&self) -> usize {
        let m = self.m();
        let masks: Vec<u64> = self
            .family
            .iter()
            .map(|s| s.iter().fold(0u64, |acc, &e| acc | 1 << (e - 1)))
            .collect();
        let full = if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        };
        (1u32..1 << m)
            .filter(|sel| {
                let u = (0..m)
                    .filter(|j| sel >> j & 1 == 1)
                    .fold(0, |acc, j| acc | masks[j]);
                u == full
            })
            .map(|sel| sel.count_ones() as usize)
            .min()
            .unwrap_or(m)
    }

    pub fn has_cover(&self) -> bool {
        self.min_cover_size() <= self.k
    }
}

/// Regression instance `(A, y)` over `{0, -inf}` whose residual has a descent
/// direction at `x = 0` exactly when the instance has a cover of size `≤ k`.
///
/// Rows: one per ground element (zeros on the sets containing it), one per
/// set, one per pair of sets, and a final all-zero row. With `a = -(m-k-3/2)/2`,
/// `b = 1`, `c = -(|a|+|b|)m²`, the row targets are `-c`, `-a`, `-b` and a last
/// entry making `Σ y = 0`. For a cover `J` of size `p` the first-order change
/// of `½‖A ⊗ x - y‖²` along the indicator of `J` is `½(m-p)(p-k-½)`.
pub fn setcover_reduction(inst: &SetCoverInstance) -> Result<(TropicalMatrix, Vec<f64>)> {
    let (n, m, k) = (inst.n, inst.m(), inst.k as f64);
    let mf = m as f64;
    let a = -(mf - k - 1.5) / 2.0;
    let b = 1.0;
    let c = -(a.abs() + b) * mf * mf;
    let pairs = m * (m - 1) / 2;
    let rows = n + m + pairs + 1;
    let ninf = f64::NEG_INFINITY;
    let mut data = vec![ninf; rows * m];
    let mut y = Vec::with_capacity(rows);
    for e in 1..=n {
        let r = e - 1;
        for (j, s) in inst.family.iter().enumerate() {
            if s.contains(&e) {
                data[r * m + j] = 0.0;
            }
        }
        y.push(c);
    }
    for j in 0..m {
        data[(n + j) * m + j] = 0.0;
        y.push(a);
    }
    let mut r = n + m;
    for j in 0..m {
        for l in j + 1..m {
            data[r * m + j] = 0.0;
            data[r * m + l] = 0.0;
            y.push(b);
            r += 1;
        }
    }
    for j in 0..m {
        data[r * m + j] = 0.0;
    }
    y.push(-(n as f64) * c - mf * a - pairs as f64 * b);
    let y = y.into_iter().map(|v| -v).collect();
    Ok((TropicalMatrix::new(rows, m, data, Semiring::MaxPlus)?, y))
}

/// Whether some `z ∈ {0,1}^m \ {0}` is a descent direction of
/// `½‖A ⊗ x - y‖²` at `x = 0`, i.e. `⟨A ⊗ z, y⟩ > 0`.
///
/// `A` must have entries in `{0, -inf}` and a zero in every row; `y` must sum
/// to zero.
pub fn has_binary_descent(a: &TropicalMatrix, y: &[f64]) -> Result<bool> {
    Ok(binary_descent(a, y)?.is_some())
}

/// First binary descent direction in bitmask order, if any.
pub fn binary_descent(a: &TropicalMatrix, y: &[f64]) -> Result<Option<Vec<f64>>> {
    let m = a.cols();
    if m > DESCENT_CAP {
        return Err(TropError::CapExceeded(format!(
            "binary descent search needs m <= {DESCENT_CAP}, got {m}"
        )));
    }
    if y.len() != a.rows() {
        return Err(TropError::DimensionMismatch(format!(
            "y has {} entries, A has {} rows",
            y.len(),
            a.rows()
        )));
    }
    if a.as_slice()
        .iter()
        .any(|&v| v != 0.0 && v != f64::NEG_INFINITY)
    {
        return Err(TropError::InvalidArgument(
            "entries must be 0 or -inf".into(),
        ));
    }
    if (0..a.rows()).any(|i| a.row(i).iter().all(|&v| v != 0.0)) {
        return Err(TropError::InvalidArgument(
            "every row needs a zero entry".into(),
        ));
    }
    let scale = y.iter().map(|v| v.abs()).fold(1.0, f64::max);
    if y.iter().sum::<f64>().abs() > 1e-9 * scale * y.len() as f64 {
        return Err(TropError::InvalidArgument("y must sum to zero".into()));
    }
    for mask in 1u32..1 << m {
        let z: Vec<f64> = (0..m).map(|j| f64::from(mask >> j & 1)).collect();
        let w = a.matvec(&z)?;
        let dot: f64 = w.iter().zip(y).map(|(u, v)| u * v).sum();
        if dot > 0.0 {
            return Ok(Some(z));
        }
    }
    Ok(None)
}
