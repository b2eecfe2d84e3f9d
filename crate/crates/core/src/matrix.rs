//! Dense matrices over the max-plus and min-plus semirings.
//!
//! Entries are stored as `f64`. The neutral element for ⊕ is `-inf` in
//! max-plus and `+inf` in min-plus; the opposite infinity and NaN are rejected
//! at construction. ⊗ treats the neutral element as absorbing, so mixed
//! infinities never reach an IEEE addition.

use std::fmt;

use crate::error::{Result, TropError};

/// The two idempotent semirings supported by the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Semiring {
    /// `(R ∪ {-inf}, max, +)`
    MaxPlus,
    /// `(R ∪ {+inf}, min, +)`
    MinPlus,
}

impl Semiring {
    /// Neutral element of ⊕ (absorbing for ⊗).
    pub fn zero(self) -> f64 {
        match self {
            Semiring::MaxPlus => f64::NEG_INFINITY,
            Semiring::MinPlus => f64::INFINITY,
        }
    }

    /// Neutral element of ⊗.
    pub fn one(self) -> f64 {
        0.0
    }

    pub fn add(self, a: f64, b: f64) -> f64 {
        match self {
            Semiring::MaxPlus => a.max(b),
            Semiring::MinPlus => a.min(b),
        }
    }

    pub fn mul(self, a: f64, b: f64) -> f64 {
        let zero = self.zero();
        if a == zero || b == zero {
            return zero;
        }
        let v = a + b;
        assert!(
            !v.is_nan(),
            "tropical product produced NaN from {a} and {b}"
        );
        v
    }

    /// True when `a` is strictly preferred by ⊕ over `b`.
    pub fn prefers(self, a: f64, b: f64) -> bool {
        match self {
            Semiring::MaxPlus => a > b,
            Semiring::MinPlus => a < b,
        }
    }

    /// The semiring reached through `x ↦ -x`.
    pub fn dual(self) -> Semiring {
        match self {
            Semiring::MaxPlus => Semiring::MinPlus,
            Semiring::MinPlus => Semiring::MaxPlus,
        }
    }

    pub fn is_valid(self, v: f64) -> bool {
        !v.is_nan() && (v.is_finite() || v == self.zero())
    }

    pub fn name(self) -> &'static str {
        match self {
            Semiring::MaxPlus => "max-plus",
            Semiring::MinPlus => "min-plus",
        }
    }
}

impl fmt::Display for Semiring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Maximum (max-plus) or minimum (min-plus) cycle mean of a square matrix.
///
/// Equals the semiring zero when the digraph of finite entries is acyclic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleMean(pub f64);

impl CycleMean {
    pub fn lambda(self) -> f64 {
        self.0
    }

    pub fn is_acyclic(self) -> bool {
        self.0.is_infinite()
    }
}

/// Dense row-major matrix over a tropical semiring.
#[derive(Debug, Clone, PartialEq)]
pub struct TropicalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    semiring: Semiring,
}

impl TropicalMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>, semiring: Semiring) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(TropError::DimensionMismatch(format!(
                "matrix must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(TropError::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        for (idx, &v) in data.iter().enumerate() {
            if !semiring.is_valid(v) {
                return Err(TropError::InvalidEntry {
                    row: idx / cols,
                    col: idx % cols,
                    value: v,
                    semiring: semiring.name(),
                });
            }
        }
        Ok(Self {
            rows,
            cols,
            data,
            semiring,
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R], semiring: Semiring) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != ncols {
                return Err(TropError::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {ncols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Self::new(nrows, ncols, data, semiring)
    }

    /// A column vector (n×1).
    pub fn column_vector(values: &[f64], semiring: Semiring) -> Result<Self> {
        Self::new(values.len(), 1, values.to_vec(), semiring)
    }

    pub fn filled(rows: usize, cols: usize, value: f64, semiring: Semiring) -> Result<Self> {
        Self::new(rows, cols, vec![value; rows * cols], semiring)
    }

    /// Tropical identity: ⊗-one on the diagonal, ⊕-zero elsewhere.
    pub fn identity(n: usize, semiring: Semiring) -> Result<Self> {
        let mut m = Self::filled(n, n, semiring.zero(), semiring)?;
        for i in 0..n {
            m.data[i * n + i] = semiring.one();
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn semiring(&self) -> Semiring {
        self.semiring
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    /// Sets an entry, rejecting values that are not members of the semiring.
    pub fn set(&mut self, i: usize, j: usize, v: f64) -> Result<()> {
        if !self.semiring.is_valid(v) {
            return Err(TropError::InvalidEntry {
                row: i,
                col: j,
                value: v,
                semiring: self.semiring.name(),
            });
        }
        self.data[i * self.cols + j] = v;
        Ok(())
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j));
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
            semiring: self.semiring,
        }
    }

    /// Largest absolute value over the finite entries (0 if there are none).
    pub fn max_abs_finite(&self) -> f64 {
        self.data
            .iter()
            .filter(|v| v.is_finite())
            .fold(0.0, |acc: f64, v| acc.max(v.abs()))
    }

    fn check_same_semiring(&self, other: &Self) -> Result<()> {
        if self.semiring != other.semiring {
            return Err(TropError::SemiringMismatch {
                left: self.semiring.name(),
                right: other.semiring.name(),
            });
        }
        Ok(())
    }

    /// Tropical matrix product `self ⊗ other`.
    pub fn tmul(&self, other: &Self) -> Result<Self> {
        self.check_same_semiring(other)?;
        if self.cols != other.rows {
            return Err(TropError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let s = self.semiring;
        let mut data = vec![s.zero(); self.rows * other.cols];
        for i in 0..self.rows {
            let out = &mut data[i * other.cols..(i + 1) * other.cols];
            for (k, &aik) in self.row(i).iter().enumerate() {
                if aik == s.zero() {
                    continue;
                }
                for (o, &bkj) in out.iter_mut().zip(other.row(k)) {
                    *o = s.add(*o, s.mul(aik, bkj));
                }
            }
        }
        Ok(Self {
            rows: self.rows,
            cols: other.cols,
            data,
            semiring: s,
        })
    }

    /// Matrix-vector product `self ⊗ x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(TropError::DimensionMismatch(format!(
                "{}x{} matrix applied to vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        let s = self.semiring;
        for (j, &v) in x.iter().enumerate() {
            if !s.is_valid(v) {
                return Err(TropError::InvalidEntry {
                    row: j,
                    col: 0,
                    value: v,
                    semiring: s.name(),
                });
            }
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(s.zero(), |acc, (&a, &xj)| s.add(acc, s.mul(a, xj)))
            })
            .collect())
    }

    /// Elementwise ⊕.
    pub fn tadd(&self, other: &Self) -> Result<Self> {
        self.check_same_semiring(other)?;
        if self.shape() != other.shape() {
            return Err(TropError::DimensionMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let s = self.semiring;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| s.add(a, b))
                .collect(),
            semiring: s,
        })
    }

    /// Scalar ⊗: `alpha` is added to every finite entry.
    pub fn tscale(&self, alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(TropError::InvalidArgument(format!(
                "scale factor must be finite, got {alpha}"
            )));
        }
        let s = self.semiring;
        Ok(Self {
            data: self.data.iter().map(|&a| s.mul(a, alpha)).collect(),
            ..self.clone()
        })
    }

    /// `self^{⊗k}` for `k ≥ 1`.
    pub fn tpow(&self, k: usize) -> Result<Self> {
        if !self.is_square() {
            return Err(TropError::DimensionMismatch(format!(
                "tpow needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        if k == 0 {
            return Err(TropError::InvalidArgument(
                "tpow exponent must be >= 1".into(),
            ));
        }
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.tmul(self)?;
        }
        Ok(acc)
    }

    /// Entrywise negation, flipping the semiring tag.
    pub fn negate_iso(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| -v).collect(),
            semiring: self.semiring.dual(),
        }
    }

    fn require_square(&self, what: &str) -> Result<()> {
        if !self.is_square() {
            return Err(TropError::DimensionMismatch(format!(
                "{what} needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(())
    }

    /// Round-off allowance used when deciding the sign of cycle weights.
    pub(crate) fn cycle_tolerance(&self) -> f64 {
        64.0 * f64::EPSILON * self.rows as f64 * (1.0 + self.max_abs_finite())
    }

    /// Maximum cycle mean (minimum for min-plus) by Karp's algorithm.
    pub fn max_cycle_mean(&self) -> Result<CycleMean> {
        self.require_square("max_cycle_mean")?;
        if self.semiring == Semiring::MinPlus {
            let neg = self.negate_iso().max_cycle_mean()?;
            return Ok(CycleMean(-neg.0));
        }
        let n = self.rows;
        // walks[k][v]: heaviest walk of exactly k edges ending at v, from any start.
        let mut walks = vec![vec![f64::NEG_INFINITY; n]; n + 1];
        walks[0].iter_mut().for_each(|w| *w = 0.0);
        for k in 1..=n {
            let (prev, next) = walks.split_at_mut(k);
            let prev = &prev[k - 1];
            let cur = &mut next[0];
            for (u, &pu) in prev.iter().enumerate() {
                if pu == f64::NEG_INFINITY {
                    continue;
                }
                for (v, &w) in self.row(u).iter().enumerate() {
                    if w != f64::NEG_INFINITY && pu + w > cur[v] {
                        cur[v] = pu + w;
                    }
                }
            }
        }
        let mut lambda = f64::NEG_INFINITY;
        #[allow(clippy::needless_range_loop)]
        for v in 0..n {
            let top = walks[n][v];
            if top == f64::NEG_INFINITY {
                continue;
            }
            let worst = (0..n)
                .filter(|&k| walks[k][v] > f64::NEG_INFINITY)
                .map(|k| (top - walks[k][v]) / (n - k) as f64)
                .fold(f64::INFINITY, f64::min);
            lambda = lambda.max(worst);
        }
        Ok(CycleMean(lambda))
    }

    /// Kleene star `I ⊕ B ⊕ B² ⊕ …` by Floyd–Warshall relaxation.
    ///
    /// Fails with [`TropError::StarDiverges`] when a cycle is strictly
    /// ⊕-better than the unit (positive in max-plus, negative in min-plus).
    pub fn kleene_star(&self) -> Result<Self> {
        self.require_square("kleene_star")?;
        let s = self.semiring;
        let n = self.rows;
        let tol = self.cycle_tolerance();
        let mut star = self.clone();
        for i in 0..n {
            let d = star.data[i * n + i];
            star.data[i * n + i] = s.add(d, 0.0);
        }
        for k in 0..n {
            let dkk = star.data[k * n + k];
            if s.prefers(dkk, 0.0) && dkk.abs() > tol {
                return Err(self.divergence_error());
            }
            for i in 0..n {
                let dik = star.data[i * n + k];
                if dik == s.zero() {
                    continue;
                }
                for j in 0..n {
                    let cand = s.mul(dik, star.data[k * n + j]);
                    let idx = i * n + j;
                    if s.prefers(cand, star.data[idx]) {
                        star.data[idx] = cand;
                    }
                }
            }
        }
        for i in 0..n {
            let d = star.data[i * n + i];
            if s.prefers(d, 0.0) && d.abs() > tol {
                return Err(self.divergence_error());
            }
            star.data[i * n + i] = 0.0;
        }
        Ok(star)
    }

    fn divergence_error(&self) -> TropError {
        let lambda = self.max_cycle_mean().map(|c| c.0).unwrap_or(f64::NAN);
        TropError::StarDiverges { lambda }
    }

    /// Classical arithmetic mean of each row, i.e. the centroid of the
    /// columns. Every entry must be finite.
    pub fn row_mean(&self) -> Result<Vec<f64>> {
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                    return Err(TropError::NonFiniteMean { row: i, col: j });
                }
                Ok(row.iter().sum::<f64>() / self.cols as f64)
            })
            .collect()
    }

    /// All-pairs shortest-path closure of a min-plus weight matrix.
    pub fn minplus_closure(&self) -> Result<Self> {
        self.require_square("minplus_closure")?;
        if self.semiring != Semiring::MinPlus {
            return Err(TropError::SemiringMismatch {
                left: self.semiring.name(),
                right: Semiring::MinPlus.name(),
            });
        }
        let n = self.rows;
        let tol = self.cycle_tolerance();
        let mut dist = self.clone();
        for i in 0..n {
            let d = dist.data[i * n + i];
            if d < -tol {
                return Err(TropError::NegativeCycle { vertex: i });
            }
            dist.data[i * n + i] = 0.0;
        }
        for k in 0..n {
            for i in 0..n {
                let dik = dist.data[i * n + k];
                if dik == f64::INFINITY {
                    continue;
                }
                for j in 0..n {
                    let dkj = dist.data[k * n + j];
                    if dkj == f64::INFINITY {
                        continue;
                    }
                    let idx = i * n + j;
                    if dik + dkj < dist.data[idx] {
                        dist.data[idx] = dik + dkj;
                    }
                }
            }
            if let Some(v) = (0..n).find(|&v| dist.data[v * n + v] < -tol) {
                return Err(TropError::NegativeCycle { vertex: v });
            }
        }
        for i in 0..n {
            dist.data[i * n + i] = 0.0;
        }
        Ok(dist)
    }
}
