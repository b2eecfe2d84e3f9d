//! Low-rank min-plus factorization `C ≈ A ⊠ B` and `C ≈ A ⊠ Aᵀ`.
//!
//! The two-factor problem alternates row and column regressions, each solved
//! in max-plus through `x ↦ -x`. The symmetric problem runs an undershooting
//! approximate Newton iteration whose Newton steps are replaced by a few
//! Jacobi sweeps on the local normal equations.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Result, TropError};
use crate::matrix::{Semiring, TropicalMatrix};
use crate::regression::{multistart_newton, polish, NewtonConfig, RegressionProblem};

/// Output of a factorization run.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationResult {
    /// `n × d` min-plus factor.
    pub a: TropicalMatrix,
    /// `d × m` right factor (two-factor problem only).
    pub b: Option<TropicalMatrix>,
    /// Squared Frobenius residual; off-diagonal only when the diagonal is
    /// excluded.
    pub residual_sq: f64,
    /// Sweeps (two-factor) or outer iterations (symmetric) of the best run.
    pub sweeps: usize,
    pub normalized: bool,
    /// Residual after initialization and after each sweep of the best run.
    pub history: Vec<f64>,
}

/// Settings for [`alternating_factorize`].
#[derive(Debug, Clone, PartialEq)]
pub struct AlternatingConfig {
    /// Inner regression solver; `starts` counts random starts per update.
    pub newton: NewtonConfig,
    pub max_sweeps: usize,
    /// Relative residual decrease below which sweeping stops.
    pub tol: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for AlternatingConfig {
    fn default() -> Self {
        Self {
            newton: NewtonConfig {
                starts: 3,
                ..NewtonConfig::default()
            },
            max_sweeps: 100,
            tol: 1e-9,
            restarts: 1,
            seed: 0,
        }
    }
}

/// Settings for [`symmetric_factorize`].
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricConfig {
    /// Jacobi sweeps per approximate Newton step.
    pub jacobi_steps: usize,
    /// Step blend at outer iteration `k` is `max(mu_floor, mu_decay^k)`.
    pub mu_decay: f64,
    pub mu_floor: f64,
    /// Outer iterations without a new best residual before stopping.
    pub stall: usize,
    pub max_iter: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SymmetricConfig {
    fn default() -> Self {
        Self {
            jacobi_steps: 3,
            mu_decay: 0.9,
            mu_floor: 0.05,
            stall: 20,
            max_iter: 2000,
            restarts: 1,
            seed: 0,
        }
    }
}

fn require_minplus_finite(c: &TropicalMatrix) -> Result<()> {
    if c.semiring() != Semiring::MinPlus {
        return Err(TropError::SemiringMismatch {
            left: c.semiring().name(),
            right: Semiring::MinPlus.name(),
        });
    }
    if let Some(idx) = c.as_slice().iter().position(|v| !v.is_finite()) {
        return Err(TropError::InvalidEntry {
            row: idx / c.cols(),
            col: idx % c.cols(),
            value: c.as_slice()[idx],
            semiring: "finite min-plus",
        });
    }
    Ok(())
}

fn check_rank(d: usize, limit: usize) -> Result<()> {
    if d == 0 || d > limit {
        return Err(TropError::InvalidArgument(format!(
            "rank must lie in 1..={limit}, got {d}"
        )));
    }
    Ok(())
}

/// `‖C - A ⊠ B‖²_F`.
pub fn factor_residual(c: &TropicalMatrix, a: &TropicalMatrix, b: &TropicalMatrix) -> Result<f64> {
    let p = a.tmul(b)?;
    if p.shape() != c.shape() {
        return Err(TropError::DimensionMismatch(format!(
            "product is {}x{} but C is {}x{}",
            p.rows(),
            p.cols(),
            c.rows(),
            c.cols()
        )));
    }
    Ok(c.as_slice()
        .iter()
        .zip(p.as_slice())
        .map(|(u, v)| (u - v) * (u - v))
        .sum())
}

/// `Σ (C - A ⊠ Aᵀ)²_ij`, over `i ≠ j` unless `include_diagonal`.
pub fn symmetric_residual(c: &TropicalMatrix, a: &TropicalMatrix, include_diagonal: bool) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j && !include_diagonal {
                continue;
            }
            let v = a
                .row(i)
                .iter()
                .zip(a.row(j))
                .map(|(x, y)| x + y)
                .fold(f64::INFINITY, f64::min);
            s += (c.get(i, j) - v).powi(2);
        }
    }
    s
}

/// Shifts each column of `A` to minimum 0 (compensating in `B`) and orders
/// columns so the last row of `A` is non-increasing.
///
/// Ties in the last row are broken by the rows above it, then by `B`, so the
/// result depends only on the product's gauge class.
pub fn normalize(
    a: &TropicalMatrix,
    b: &TropicalMatrix,
) -> Result<(TropicalMatrix, TropicalMatrix)> {
    let (n, d) = a.shape();
    if b.rows() != d {
        return Err(TropError::DimensionMismatch(format!(
            "A has {d} columns but B has {} rows",
            b.rows()
        )));
    }
    let mut cols: Vec<(Vec<f64>, Vec<f64>)> = (0..d)
        .map(|k| {
            let col = a.column(k);
            let s = col.iter().copied().fold(f64::INFINITY, f64::min);
            let col: Vec<f64> = col.iter().map(|v| v - s).collect();
            let row: Vec<f64> = b.row(k).iter().map(|v| v + s).collect();
            (col, row)
        })
        .collect();
    cols.sort_by(|(ca, ra), (cb, rb)| {
        let key_a = ca.iter().rev().chain(ra.iter());
        let key_b = cb.iter().rev().chain(rb.iter());
        key_b
            .zip(key_a)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut adata = vec![0.0; n * d];
    for (k, (col, _)) in cols.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            adata[i * d + k] = v;
        }
    }
    let bdata: Vec<f64> = cols.iter().flat_map(|(_, r)| r.iter().copied()).collect();
    Ok((
        TropicalMatrix::new(n, d, adata, Semiring::MinPlus)?,
        TropicalMatrix::new(d, b.cols(), bdata, Semiring::MinPlus)?,
    ))
}

/// Regression `min_z ‖M ⊗ z - t‖₂` keeping `warm` unless a candidate does
/// at least as well.
fn best_update(
    m: TropicalMatrix,
    target: Vec<f64>,
    warm: Option<&[f64]>,
    cfg: &NewtonConfig,
) -> Result<Vec<f64>> {
    let problem = RegressionProblem::new(m, target)?;
    let mut best = multistart_newton(&problem, cfg)?;
    if let Some(w) = warm {
        let from_warm = polish(&problem, cfg, w)?;
        if from_warm.residual <= best.residual {
            best = from_warm;
        }
        let keep = problem.half_sq(w);
        if (best.residual * best.residual) / 2.0 > keep {
            return Ok(w.to_vec());
        }
    }
    Ok(best.x)
}

fn negated(m: &TropicalMatrix) -> TropicalMatrix {
    let n = m.negate_iso();
    TropicalMatrix::new(n.rows(), n.cols(), n.as_slice().to_vec(), Semiring::MaxPlus)
        .expect("finite entries")
}

fn update_rows(
    c: &TropicalMatrix,
    a: &TropicalMatrix,
    b: &TropicalMatrix,
    cfg: &NewtonConfig,
) -> Result<TropicalMatrix> {
    // Row i of A solves min_x ‖x ⊠ B - C(i,:)‖, i.e. (-B)ᵀ ⊗ (-x) ≈ -C(i,:).
    let m = negated(b).transpose();
    let rows: Vec<Vec<f64>> = (0..c.rows())
        .into_par_iter()
        .map(|i| {
            let target: Vec<f64> = c.row(i).iter().map(|v| -v).collect();
            let warm: Vec<f64> = a.row(i).iter().map(|v| -v).collect();
            let z = best_update(m.clone(), target, Some(&warm), cfg)?;
            Ok(z.iter().map(|v| -v).collect())
        })
        .collect::<Result<_>>()?;
    TropicalMatrix::from_rows(&rows, Semiring::MinPlus)
}

fn update_cols(
    c: &TropicalMatrix,
    a: &TropicalMatrix,
    b: Option<&TropicalMatrix>,
    cfg: &NewtonConfig,
) -> Result<TropicalMatrix> {
    let m = negated(a);
    let cols: Vec<Vec<f64>> = (0..c.cols())
        .into_par_iter()
        .map(|j| {
            let target: Vec<f64> = c.column(j).iter().map(|v| -v).collect();
            let warm: Option<Vec<f64>> = b.map(|b| b.column(j).iter().map(|v| -v).collect());
            let z = best_update(m.clone(), target, warm.as_deref(), cfg)?;
            Ok(z.iter().map(|v| -v).collect())
        })
        .collect::<Result<_>>()?;
    Ok(TropicalMatrix::from_rows(&cols, Semiring::MinPlus)?.transpose())
}

fn pick_columns(c: &TropicalMatrix, d: usize, rng: &mut ChaCha8Rng) -> Result<TropicalMatrix> {
    let mut idx = sample(rng, c.cols(), d).into_vec();
    idx.sort_unstable();
    let rows: Vec<Vec<f64>> = (0..c.rows())
        .map(|i| idx.iter().map(|&j| c.get(i, j)).collect())
        .collect();
    TropicalMatrix::from_rows(&rows, Semiring::MinPlus)
}

fn alternating_run(
    c: &TropicalMatrix,
    d: usize,
    config: &AlternatingConfig,
    restart: usize,
) -> Result<FactorizationResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(restart as u64);
    let mut inner = config.newton.clone();
    inner.seed = config.seed.wrapping_add(restart as u64);
    let mut a = pick_columns(c, d, &mut rng)?;
    let mut b = update_cols(c, &a, None, &inner)?;
    let mut r = factor_residual(c, &a, &b)?;
    let mut history = vec![r];
    let mut sweeps = 0;
    while sweeps < config.max_sweeps {
        a = update_rows(c, &a, &b, &inner)?;
        b = update_cols(c, &a, Some(&b), &inner)?;
        sweeps += 1;
        let next = factor_residual(c, &a, &b)?;
        history.push(next);
        let done = r - next <= config.tol * r.max(1.0);
        r = next;
        if done {
            break;
        }
    }
    let (a, b) = normalize(&a, &b)?;
    let residual_sq = factor_residual(c, &a, &b)?;
    Ok(FactorizationResult {
        a,
        b: Some(b),
        residual_sq,
        sweeps,
        normalized: true,
        history,
    })
}

fn best_of(runs: Vec<FactorizationResult>) -> FactorizationResult {
    runs.into_iter()
        .reduce(|b, r| if r.residual_sq < b.residual_sq { r } else { b })
        .expect("at least one restart")
}

/// Best rank-`d` factorization `C ≈ A ⊠ B` over `config.restarts` random
/// initializations.
///
/// Each restart takes `d` distinct random columns of `C` as `A`, solves for
/// `B`, then alternates row and column updates. An update is kept only if it
/// does not increase that row's or column's residual, so sweeps never
/// increase the total residual.
pub fn alternating_factorize(
    c: &TropicalMatrix,
    d: usize,
    config: &AlternatingConfig,
) -> Result<FactorizationResult> {
    require_minplus_finite(c)?;
    check_rank(d, c.rows().min(c.cols()))?;
    config.newton.validate()?;
    if config.restarts == 0 {
        return Err(TropError::InvalidArgument(
            "restarts must be positive".into(),
        ));
    }
    let runs = (0..config.restarts)
        .into_par_iter()
        .map(|r| alternating_run(c, d, config, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(best_of(runs))
}

/// `K(A)_ij = min argmin_k (a_ik + a_jk)`, stored row-major (0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentMatrix {
    pub n: usize,
    pub k: Vec<usize>,
}

impl AssignmentMatrix {
    pub fn get(&self, i: usize, j: usize) -> usize {
        self.k[i * self.n + j]
    }
}

pub fn assignment(a: &TropicalMatrix) -> AssignmentMatrix {
    let n = a.rows();
    let mut k = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let (mut best, mut arg) = (f64::INFINITY, 0);
            for (c, (x, y)) in a.row(i).iter().zip(a.row(j)).enumerate() {
                if x + y < best {
                    best = x + y;
                    arg = c;
                }
            }
            k.push(arg);
        }
    }
    AssignmentMatrix { n, k }
}

/// `R_K(A') = Σ (a'_{i K_ij} + a'_{j K_ij} - c_ij)²` over the included pairs.
pub fn assignment_residual(
    c: &TropicalMatrix,
    k: &AssignmentMatrix,
    a: &TropicalMatrix,
    include_diagonal: bool,
) -> f64 {
    let n = k.n;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j && !include_diagonal {
                continue;
            }
            let kk = k.get(i, j);
            s += (a.get(i, kk) + a.get(j, kk) - c.get(i, j)).powi(2);
        }
    }
    s
}

fn jacobi_with(
    k: &AssignmentMatrix,
    a_iter: &TropicalMatrix,
    c: &TropicalMatrix,
    include_diagonal: bool,
) -> TropicalMatrix {
    let (n, d) = a_iter.shape();
    let mut num = vec![0.0; n * d];
    let mut den = vec![0.0; n * d];
    for i in 0..n {
        for j in 0..n {
            let kk = k.get(i, j);
            if i == j {
                if include_diagonal {
                    num[i * d + kk] += c.get(i, i);
                    den[i * d + kk] += 2.0;
                }
            } else {
                num[i * d + kk] += c.get(i, j) - a_iter.get(j, kk);
                den[i * d + kk] += 1.0;
            }
        }
    }
    let data = (0..n * d)
        .map(|idx| {
            if den[idx] == 0.0 {
                a_iter.as_slice()[idx]
            } else {
                num[idx] / den[idx]
            }
        })
        .collect();
    TropicalMatrix::new(n, d, data, Semiring::MinPlus).expect("finite")
}

/// One Jacobi sweep on the normal equations of `R_{K(A_base)}` at `A_iter`.
///
/// The diagonal term for `(i, k)` is active when `K(A_base)_ii = k`. Entries
/// with no assigned pair keep their value.
pub fn jacobi_map(
    a_base: &TropicalMatrix,
    a_iter: &TropicalMatrix,
    c: &TropicalMatrix,
    include_diagonal: bool,
) -> Result<TropicalMatrix> {
    if a_base.shape() != a_iter.shape() || c.rows() != a_base.rows() || !c.is_square() {
        return Err(TropError::DimensionMismatch(
            "jacobi_map needs n×d factors and an n×n target".into(),
        ));
    }
    Ok(jacobi_with(
        &assignment(a_base),
        a_iter,
        c,
        include_diagonal,
    ))
}

fn symmetrized(c: &TropicalMatrix) -> Result<TropicalMatrix> {
    let n = c.rows();
    let asym = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j)
        .map(|(i, j)| (c.get(i, j) - c.get(j, i)).abs())
        .fold(0.0, f64::max);
    if asym <= 1e-9 {
        return Ok(c.clone());
    }
    let data = (0..n * n)
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            0.5 * (c.get(i, j) + c.get(j, i))
        })
        .collect();
    TropicalMatrix::new(n, n, data, Semiring::MinPlus)
}

/// `fit` drives the Jacobi updates; `observed` is the matrix the residual is
/// reported against. They differ by a constant when `observed` is
/// asymmetric, so the best iterate is the same under either.
fn symmetric_run(
    fit: &TropicalMatrix,
    observed: &TropicalMatrix,
    mut a: TropicalMatrix,
    include_diagonal: bool,
    config: &SymmetricConfig,
) -> FactorizationResult {
    let mut best_r = symmetric_residual(observed, &a, include_diagonal);
    let mut best_a = a.clone();
    let mut history = vec![best_r];
    let mut since = 0;
    let mut iters = 0;
    while iters < config.max_iter {
        let k = assignment(&a);
        let mut target = a.clone();
        for _ in 0..config.jacobi_steps {
            target = jacobi_with(&k, &target, fit, include_diagonal);
        }
        let mu = config.mu_decay.powi(iters as i32).max(config.mu_floor);
        let data = a
            .as_slice()
            .iter()
            .zip(target.as_slice())
            .map(|(u, v)| (1.0 - mu) * u + mu * v)
            .collect();
        a = TropicalMatrix::new(a.rows(), a.cols(), data, Semiring::MinPlus).expect("finite");
        iters += 1;
        let r = symmetric_residual(observed, &a, include_diagonal);
        history.push(r);
        if r < best_r {
            best_r = r;
            best_a = a.clone();
            since = 0;
        } else {
            since += 1;
            if since >= config.stall {
                break;
            }
        }
    }
    FactorizationResult {
        a: best_a,
        b: None,
        residual_sq: best_r,
        sweeps: iters,
        normalized: false,
        history,
    }
}

fn check_symmetric_inputs(
    c: &TropicalMatrix,
    d: usize,
    config: &SymmetricConfig,
) -> Result<TropicalMatrix> {
    require_minplus_finite(c)?;
    if !c.is_square() {
        return Err(TropError::DimensionMismatch(format!(
            "symmetric factorization needs a square matrix, got {}x{}",
            c.rows(),
            c.cols()
        )));
    }
    check_rank(d, c.rows())?;
    if config.jacobi_steps == 0 || config.stall == 0 || config.restarts == 0 {
        return Err(TropError::InvalidArgument(
            "jacobi_steps, stall and restarts must be positive".into(),
        ));
    }
    if !(config.mu_floor > 0.0
        && config.mu_floor <= 1.0
        && config.mu_decay > 0.0
        && config.mu_decay <= 1.0)
    {
        return Err(TropError::InvalidArgument(
            "step schedule must lie in (0, 1]".into(),
        ));
    }
    symmetrized(c)
}

/// Best rank-`d` symmetric factorization `C ≈ A ⊠ Aᵀ` over
/// `config.restarts` initializations drawn from the columns of `C`.
///
/// With `include_diagonal = false` the diagonal of `C` is ignored, which
/// models `C ≈ I ⊞ A ⊠ Aᵀ`. An asymmetric `C` is fitted through
/// `(C + Cᵀ)/2`; the reported residual is always against `C` itself.
pub fn symmetric_factorize(
    c: &TropicalMatrix,
    d: usize,
    include_diagonal: bool,
    config: &SymmetricConfig,
) -> Result<FactorizationResult> {
    let observed = c;
    let c = check_symmetric_inputs(c, d, config)?;
    let runs = (0..config.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(r as u64);
            let a0 = pick_columns(&c, d, &mut rng)?;
            Ok(symmetric_run(&c, observed, a0, include_diagonal, config))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(best_of(runs))
}

/// Symmetric factorization from a caller-supplied initial factor.
pub fn symmetric_factorize_from(
    c: &TropicalMatrix,
    a0: &TropicalMatrix,
    include_diagonal: bool,
    config: &SymmetricConfig,
) -> Result<FactorizationResult> {
    let observed = c;
    let c = check_symmetric_inputs(c, a0.cols(), config)?;
    require_minplus_finite(a0)?;
    if a0.rows() != c.rows() {
        return Err(TropError::DimensionMismatch(format!(
            "initial factor has {} rows, expected {}",
            a0.rows(),
            c.rows()
        )));
    }
    Ok(symmetric_run(
        &c,
        observed,
        a0.clone(),
        include_diagonal,
        config,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mp(rows: &[&[f64]]) -> TropicalMatrix {
        TropicalMatrix::from_rows(rows, Semiring::MinPlus).unwrap()
    }

    #[test]
    fn assignment_ties_pick_smallest_index() {
        let k = assignment(&mp(&[&[1.0, 3.0], &[2.0, 0.0]]));
        assert_eq!(k.get(0, 1), 0);
        let k2 = assignment(&mp(&[&[0.0, 5.0], &[5.0, 0.0]]));
        assert_eq!(k2.get(0, 0), 0);
        assert_eq!(k2.get(0, 1), 0);
        let k1 = assignment(&mp(&[&[4.0], &[1.0], &[2.0]]));
        assert!(k1.k.iter().all(|&v| v == 0));
    }

    #[test]
    fn jacobi_reference_fixed_point() {
        let c = mp(&[&[0.0, 4.0], &[4.0, 0.0]]);
        let a = mp(&[&[2.0], &[2.0]]);
        assert_eq!(jacobi_map(&a, &a, &c, false).unwrap(), a);
    }

    #[test]
    fn jacobi_keeps_unassigned_entries() {
        let c = mp(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let a = mp(&[&[0.0, 9.0], &[0.0, 9.0]]);
        let j = jacobi_map(&a, &a, &c, false).unwrap();
        assert_eq!(j.get(0, 1), 9.0);
        assert_eq!(j.get(0, 0), 1.0);
    }

    #[test]
    fn assignment_residual_matches_direct() {
        let c = mp(&[&[0.0, 3.0, 4.0], &[3.0, 0.0, 2.5], &[4.0, 2.5, 0.0]]);
        let a = mp(&[&[1.0, 2.0], &[0.5, 3.0], &[2.0, 0.2]]);
        let k = assignment(&a);
        for diag in [true, false] {
            let lhs = assignment_residual(&c, &k, &a, diag);
            let rhs = symmetric_residual(&c, &a, diag);
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn normalize_conditions_and_idempotence() {
        let a = mp(&[&[1.0, 4.0], &[3.0, 2.0], &[0.5, 6.0]]);
        let b = mp(&[&[0.0, 1.0, 2.0], &[2.0, 0.0, 5.0]]);
        let c = a.tmul(&b).unwrap();
        let (na, nb) = normalize(&a, &b).unwrap();
        for k in 0..2 {
            assert_eq!(
                na.column(k).iter().copied().fold(f64::INFINITY, f64::min),
                0.0
            );
        }
        assert!(na.get(2, 0) >= na.get(2, 1));
        assert_eq!(na.tmul(&nb).unwrap(), c);
        assert_eq!(normalize(&na, &nb).unwrap(), (na, nb));
    }

    #[test]
    fn exact_product_is_recovered() {
        let a = mp(&[&[0.0, 3.0], &[2.0, 0.0], &[1.0, 1.0], &[4.0, 0.5]]);
        let b = mp(&[&[0.0, 2.0, 5.0, 1.0], &[3.0, 0.0, 1.0, 2.0]]);
        let c = a.tmul(&b).unwrap();
        let cfg = AlternatingConfig {
            restarts: 4,
            ..AlternatingConfig::default()
        };
        let r = alternating_factorize(&c, 2, &cfg).unwrap();
        assert!(r.residual_sq < 1e-8, "{}", r.residual_sq);
        assert!(r.history.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn rank_is_validated() {
        let c = mp(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(alternating_factorize(&c, 3, &AlternatingConfig::default()).is_err());
        assert!(symmetric_factorize(&c, 0, false, &SymmetricConfig::default()).is_err());
    }

    #[test]
    fn symmetric_from_true_factor() {
        let m = mp(&[
            &[8.0, 4.0],
            &[8.0, 3.0],
            &[1.0, 8.0],
            &[2.0, 7.0],
            &[7.0, 7.0],
        ]);
        let c = m.tmul(&m.transpose()).unwrap();
        let r = symmetric_factorize_from(&c, &m, false, &SymmetricConfig::default()).unwrap();
        assert!(r.residual_sq < 1e-20);
    }
}
