//! Patterns of support and the polyhedral geometry they induce.
//!
//! A pattern records, for each row of `A`, which columns attain the maximum in
//! `(A ⊗ x)_i`. Column indices are 0-based throughout.

use crate::error::{Result, TropError};
use crate::matrix::{Semiring, TropicalMatrix};

/// Per-row argmax sets `P = (P_0, …, P_{n-1})`, each a sorted non-empty
/// subset of `0..d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    sets: Vec<Vec<usize>>,
    d: usize,
}

impl Pattern {
    pub fn new(sets: Vec<Vec<usize>>, d: usize) -> Result<Self> {
        if sets.is_empty() || d == 0 {
            return Err(TropError::InvalidArgument(
                "pattern needs at least one row and one column".into(),
            ));
        }
        let mut clean = Vec::with_capacity(sets.len());
        for (i, mut s) in sets.into_iter().enumerate() {
            s.sort_unstable();
            s.dedup();
            if s.is_empty() {
                return Err(TropError::InvalidArgument(format!(
                    "row {i} has an empty set"
                )));
            }
            if let Some(&j) = s.iter().find(|&&j| j >= d) {
                return Err(TropError::InvalidArgument(format!(
                    "row {i} references column {j} but d = {d}"
                )));
            }
            clean.push(s);
        }
        Ok(Self { sets: clean, d })
    }

    /// The singleton pattern `({ℓ(0)}, …, {ℓ(n-1)})`.
    pub fn from_subpattern(ell: &[usize], d: usize) -> Result<Self> {
        Self::new(ell.iter().map(|&j| vec![j]).collect(), d)
    }

    pub fn n(&self) -> usize {
        self.sets.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.sets[i]
    }

    /// `ℓ(i) = min P_i`.
    pub fn subpattern(&self) -> Vec<usize> {
        self.sets.iter().map(|s| s[0]).collect()
    }

    /// Indicator of `∪_i P_i`.
    pub fn support(&self) -> Vec<bool> {
        let mut mask = vec![false; self.d];
        for s in &self.sets {
            for &j in s {
                mask[j] = true;
            }
        }
        mask
    }

    /// Per-row inclusion `self ⪯ other`.
    pub fn preceq(&self, other: &Pattern) -> bool {
        self.d == other.d
            && self.n() == other.n()
            && self
                .sets
                .iter()
                .zip(&other.sets)
                .all(|(a, b)| a.iter().all(|j| b.binary_search(j).is_ok()))
    }

    pub fn is_singleton(&self) -> bool {
        self.sets.iter().all(|s| s.len() == 1)
    }
}

impl std::fmt::Display for Pattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("(")?;
        for (i, s) in self.sets.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str("{")?;
            for (k, j) in s.iter().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{j}")?;
            }
            f.write_str("}")?;
        }
        f.write_str(")")
    }
}

fn require_maxplus(a: &TropicalMatrix) -> Result<()> {
    if a.semiring() != Semiring::MaxPlus {
        return Err(TropError::SemiringMismatch {
            left: a.semiring().name(),
            right: Semiring::MaxPlus.name(),
        });
    }
    Ok(())
}

fn check_shape(a: &TropicalMatrix, p: &Pattern) -> Result<()> {
    if a.rows() != p.n() || a.cols() != p.d() {
        return Err(TropError::DimensionMismatch(format!(
            "pattern is {}x{} but matrix is {}x{}",
            p.n(),
            p.d(),
            a.rows(),
            a.cols()
        )));
    }
    Ok(())
}

/// `pattern(x)` with exact tie detection.
pub fn compute_pattern(a: &TropicalMatrix, x: &[f64]) -> Result<Pattern> {
    compute_pattern_tol(a, x, 0.0)
}

/// `pattern(x)` where any term within `tol` of the row maximum counts as a tie.
pub fn compute_pattern_tol(a: &TropicalMatrix, x: &[f64], tol: f64) -> Result<Pattern> {
    require_maxplus(a)?;
    let ax = a.matvec(x)?;
    let mut sets = Vec::with_capacity(a.rows());
    for (i, &m) in ax.iter().enumerate() {
        if m == f64::NEG_INFINITY {
            return Err(TropError::DegenerateRow { row: i });
        }
        let row = a.row(i);
        let s: Vec<usize> = (0..a.cols())
            .filter(|&j| {
                let v = row[j] + x[j];
                v.is_finite() && m - v <= tol
            })
            .collect();
        sets.push(s);
    }
    Pattern::new(sets, a.cols())
}

/// Feasibility matrix built from the first `sets.len()` rows of `a`.
///
/// This is the partial matrix used when searching the pattern tree; with a
/// full pattern it is `F_P`. Members `j` with `a_ij = -inf` contribute
/// nothing here; such sets can never be attained and callers reject them
/// with [`set_is_finite`].
pub fn feasibility_matrix_rows(a: &TropicalMatrix, sets: &[Vec<usize>]) -> TropicalMatrix {
    let d = a.cols();
    let mut f = vec![f64::NEG_INFINITY; d * d];
    for j in 0..d {
        f[j * d + j] = 0.0;
    }
    for (i, s) in sets.iter().enumerate() {
        let row = a.row(i);
        for &j in s {
            let aij = row[j];
            if !aij.is_finite() {
                continue;
            }
            for (k, &aik) in row.iter().enumerate() {
                if k == j || aik == f64::NEG_INFINITY {
                    continue;
                }
                let v = aik - aij;
                if v > f[j * d + k] {
                    f[j * d + k] = v;
                }
            }
        }
    }
    TropicalMatrix::new(d, d, f, Semiring::MaxPlus).expect("feasibility matrix entries are valid")
}

/// True when every column named in `set` has a finite entry in `row`.
pub fn set_is_finite(row: &[f64], set: &[usize]) -> bool {
    set.iter().all(|&j| row[j].is_finite())
}

/// `F_P`: `f_jj = 0`, `f_jk = max{a_ik - a_ij : j ∈ P_i}`.
pub fn feasibility_matrix(a: &TropicalMatrix, p: &Pattern) -> Result<TropicalMatrix> {
    require_maxplus(a)?;
    check_shape(a, p)?;
    Ok(feasibility_matrix_rows(a, p.sets()))
}

/// Whether `λ(f) = 0`, up to round-off in the cycle sums.
pub(crate) fn zero_cycle_mean(f: &TropicalMatrix) -> bool {
    let lambda = f.max_cycle_mean().expect("square").lambda();
    lambda <= f.cycle_tolerance()
}

/// `P` is feasible iff the maximum cycle mean of `F_P` is zero.
pub fn is_feasible(a: &TropicalMatrix, p: &Pattern) -> Result<bool> {
    let f = feasibility_matrix(a, p)?;
    for (i, s) in p.sets().iter().enumerate() {
        if !set_is_finite(a.row(i), s) {
            return Ok(false);
        }
    }
    Ok(zero_cycle_mean(&f))
}

/// A point whose pattern is exactly `P`: the classical mean of the columns
/// of `F_P*`.
///
/// Columns that `F_P` leaves unconstrained would make `F_P*` partly `-inf`.
/// Those gaps are bridged with weak links of weight `-K`, where `K` exceeds
/// every finite path weight, so the star is finite and its mean still lies
/// in the relative interior of the domain.
pub fn interior_point(a: &TropicalMatrix, p: &Pattern) -> Result<Vec<f64>> {
    let f = feasibility_matrix(a, p)?;
    if !is_feasible(a, p)? {
        let lambda = f.max_cycle_mean()?.lambda();
        return Err(TropError::StarDiverges { lambda });
    }
    let d = f.cols();
    let star = f.kleene_star()?;
    if star.as_slice().iter().all(|v| v.is_finite()) {
        return star.row_mean();
    }
    let k = 2.0 * d as f64 * f.max_abs_finite() + 1.0;
    let mut g = f.clone();
    for j in 0..d {
        for l in 0..d {
            if j != l && g.get(j, l) < -k {
                g.set(j, l, -k)?;
            }
        }
    }
    g.kleene_star()?.row_mean()
}

/// Equivalence classes of `⋈_P` together with the class map and `ℓ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classes {
    /// `class_of[j]` is the class index of column `j`.
    pub class_of: Vec<usize>,
    /// Members of each class, sorted; classes ordered by smallest member.
    pub members: Vec<Vec<usize>>,
    /// `ℓ(i) = min P_i`.
    pub ell: Vec<usize>,
}

impl Classes {
    pub fn count(&self) -> usize {
        self.members.len()
    }

    /// Class of each row, `c(ℓ(i))`.
    pub fn row_class(&self) -> Vec<usize> {
        self.ell.iter().map(|&j| self.class_of[j]).collect()
    }
}

fn find(parent: &mut [usize], mut v: usize) -> usize {
    while parent[v] != v {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    v
}

pub fn equivalence_classes(p: &Pattern) -> Classes {
    let d = p.d();
    let mut parent: Vec<usize> = (0..d).collect();
    for s in p.sets() {
        for &j in &s[1..] {
            let (r0, r1) = (find(&mut parent, s[0]), find(&mut parent, j));
            if r0 != r1 {
                let (lo, hi) = (r0.min(r1), r0.max(r1));
                parent[hi] = lo;
            }
        }
    }
    let mut class_of = vec![usize::MAX; d];
    let mut members: Vec<Vec<usize>> = Vec::new();
    for j in 0..d {
        let r = find(&mut parent, j);
        if class_of[r] == usize::MAX {
            class_of[r] = members.len();
            members.push(Vec::new());
        }
        class_of[j] = class_of[r];
        members[class_of[j]].push(j);
    }
    Classes {
        class_of,
        members,
        ell: p.subpattern(),
    }
}

/// All derived objects of a pattern.
#[derive(Debug, Clone)]
pub struct PatternGeometry {
    pub pattern: Pattern,
    pub f: TropicalMatrix,
    pub classes: Classes,
    pub support: Vec<bool>,
}

impl PatternGeometry {
    pub fn new(a: &TropicalMatrix, p: &Pattern) -> Result<Self> {
        Ok(Self {
            f: feasibility_matrix(a, p)?,
            classes: equivalence_classes(p),
            support: p.support(),
            pattern: p.clone(),
        })
    }

    /// Class means of `y - L x_P - a_P`; classes without rows get 0.
    pub fn class_shift(&self, a: &TropicalMatrix, y: &[f64], anchor: &[f64]) -> Vec<f64> {
        let m = self.classes.count();
        let mut sum = vec![0.0; m];
        let mut cnt = vec![0usize; m];
        for (i, &l) in self.classes.ell.iter().enumerate() {
            let c = self.classes.class_of[l];
            sum[c] += y[i] - anchor[l] - a.get(i, l);
            cnt[c] += 1;
        }
        sum.iter()
            .zip(&cnt)
            .map(|(&s, &k)| if k == 0 { 0.0 } else { s / k as f64 })
            .collect()
    }

    /// `Φ(P, y)` for the extended domain through `anchor`.
    pub fn phi(&self, a: &TropicalMatrix, y: &[f64], anchor: &[f64]) -> Vec<f64> {
        let h = self.class_shift(a, y, anchor);
        self.classes
            .ell
            .iter()
            .enumerate()
            .map(|(i, &l)| h[self.classes.class_of[l]] + anchor[l] + a.get(i, l))
            .collect()
    }

    /// `Ψ(P, y, x)`: the class-shifted anchor on the support and `off[j]`
    /// elsewhere.
    pub fn psi(&self, a: &TropicalMatrix, y: &[f64], anchor: &[f64], off: &[f64]) -> Vec<f64> {
        let h = self.class_shift(a, y, anchor);
        (0..self.pattern.d())
            .map(|j| {
                if self.support[j] {
                    anchor[j] + h[self.classes.class_of[j]]
                } else {
                    off[j]
                }
            })
            .collect()
    }

    /// `F_P ⊗ x = x` up to round-off.
    pub fn is_fixed_point(&self, x: &[f64]) -> bool {
        let fx = self.f.matvec(x).expect("length d");
        let scale = x
            .iter()
            .filter(|v| v.is_finite())
            .fold(self.f.max_abs_finite(), |acc, v| acc.max(v.abs()));
        let tol = 64.0 * f64::EPSILON * self.pattern.d() as f64 * (1.0 + scale);
        fx.iter().zip(x).all(|(&u, &v)| {
            if v == f64::NEG_INFINITY {
                u == f64::NEG_INFINITY
            } else {
                u - v <= tol
            }
        })
    }

    /// Admissibility test against the `-inf` completion of `Ψ`.
    pub fn admissible(&self, a: &TropicalMatrix, y: &[f64], anchor: &[f64]) -> bool {
        let off = vec![f64::NEG_INFINITY; self.pattern.d()];
        self.is_fixed_point(&self.psi(a, y, anchor, &off))
    }
}

/// Result of projecting a target onto a pattern's extended image.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult {
    pub phi: Vec<f64>,
    /// Solution-space point; `x_P` is kept off the support.
    pub psi: Vec<f64>,
    pub admissible: bool,
    /// `‖Φ - y‖²₂`.
    pub residual_sq: f64,
}

fn check_vec(name: &str, v: &[f64], len: usize) -> Result<()> {
    if v.len() != len {
        return Err(TropError::DimensionMismatch(format!(
            "{name} has length {}, expected {len}",
            v.len()
        )));
    }
    Ok(())
}

/// Normal projection of `y` through the domain anchored at `x_p`.
///
/// `x_p` should lie in the closure of the domain of `P`; admissibility is
/// decided independently of it, through [`interior_point`].
pub fn normal_projection(
    a: &TropicalMatrix,
    p: &Pattern,
    y: &[f64],
    x_p: &[f64],
) -> Result<ProjectionResult> {
    let geom = PatternGeometry::new(a, p)?;
    check_vec("y", y, p.n())?;
    check_vec("x_P", x_p, p.d())?;
    let phi = geom.phi(a, y, x_p);
    let psi = geom.psi(a, y, x_p, x_p);
    let admissible = {
        let anchor = interior_point(a, p)?;
        geom.admissible(a, y, &anchor)
    };
    let residual_sq = phi.iter().zip(y).map(|(u, v)| (u - v) * (u - v)).sum();
    Ok(ProjectionResult {
        phi,
        psi,
        admissible,
        residual_sq,
    })
}

/// Whether `Φ(P, y)` lies in the closure of the image of `P`.
pub fn is_admissible(a: &TropicalMatrix, p: &Pattern, y: &[f64]) -> Result<bool> {
    check_vec("y", y, p.n())?;
    let geom = PatternGeometry::new(a, p)?;
    let anchor = interior_point(a, p)?;
    Ok(geom.admissible(a, y, &anchor))
}

/// `R_P(x) = ‖L x + a_P - y‖²₂ / 2`.
pub fn local_residual(a: &TropicalMatrix, p: &Pattern, x: &[f64], y: &[f64]) -> Result<f64> {
    check_shape(a, p)?;
    check_vec("x", x, p.d())?;
    check_vec("y", y, p.n())?;
    Ok(p.subpattern()
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            let r = x[l] + a.get(i, l) - y[i];
            r * r
        })
        .sum::<f64>()
        / 2.0)
}
