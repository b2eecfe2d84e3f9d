use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Result, TropError};
use crate::matrix::{Semiring, TropicalMatrix};
use crate::regression::{irsls, multistart_newton, IrslsConfig, NewtonConfig, RegressionProblem};

/// Observed orbit `x(0), …, x(N)` of a `d`-dimensional system.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    states: Vec<Vec<f64>>,
}

impl TimeSeries {
    /// One state per entry, in time order. Needs `N ≥ 1` and finite values.
    pub fn new(states: Vec<Vec<f64>>) -> Result<Self> {
        if states.len() < 2 {
            return Err(TropError::InvalidArgument(format!(
                "a time series needs at least 2 observations, got {}",
                states.len()
            )));
        }
        let d = states[0].len();
        if d == 0 {
            return Err(TropError::InvalidArgument("observations are empty".into()));
        }
        for (n, s) in states.iter().enumerate() {
            if s.len() != d {
                return Err(TropError::DimensionMismatch(format!(
                    "observation {n} has {} entries, expected {d}",
                    s.len()
                )));
            }
            if let Some(j) = s.iter().position(|v| !v.is_finite()) {
                return Err(TropError::InvalidEntry {
                    row: n,
                    col: j,
                    value: s[j],
                    semiring: "finite",
                });
            }
        }
        Ok(Self { states })
    }

    pub fn dim(&self) -> usize {
        self.states[0].len()
    }

    /// Number of transitions `N`.
    pub fn steps(&self) -> usize {
        self.states.len() - 1
    }

    pub fn state(&self, n: usize) -> &[f64] {
        &self.states[n]
    }

    /// Rows are time points.
    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    /// `N × d` max-plus matrix whose row `n` is `x(n)`; the design for every
    /// row regression.
    fn design(&self) -> TropicalMatrix {
        TropicalMatrix::from_rows(&self.states[..self.steps()], Semiring::MaxPlus)
            .expect("finite states")
    }

    /// `x_k(1), …, x_k(N)`.
    fn targets(&self, k: usize) -> Vec<f64> {
        self.states[1..].iter().map(|s| s[k]).collect()
    }
}

/// `x(n+1) = M ⊗ x(n) + ζ(n)` with `ζ(n) ~ N(0, σ² I)`, for `N` steps.
pub fn simulate_orbit(
    m: &TropicalMatrix,
    x0: &[f64],
    steps: usize,
    sigma: f64,
    seed: u64,
) -> Result<TimeSeries> {
    if m.semiring() != Semiring::MaxPlus || !m.is_square() || m.rows() != x0.len() {
        return Err(TropError::DimensionMismatch(format!(
            "need a square max-plus matrix matching x0 of length {}",
            x0.len()
        )));
    }
    if let Some(i) = (0..m.rows()).find(|&i| m.row(i).iter().all(|v| !v.is_finite())) {
        return Err(TropError::DegenerateRow { row: i });
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(TropError::InvalidArgument(format!(
            "sigma must be non-negative, got {sigma}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut states = Vec::with_capacity(steps + 1);
    states.push(x0.to_vec());
    for n in 0..steps {
        let mut next = m.matvec(&states[n])?;
        for v in &mut next {
            let z: f64 = StandardNormal.sample(&mut rng);
            *v += sigma * z;
        }
        states.push(next);
    }
    TimeSeries::new(states)
}

/// `‖A ⊗ X(:, 0..N) - X(:, 1..=N)‖²_F`.
pub fn frob_residual_sq(a: &TropicalMatrix, x: &TimeSeries) -> Result<f64> {
    let mut s = 0.0;
    for n in 0..x.steps() {
        let p = a.matvec(x.state(n))?;
        s += p
            .iter()
            .zip(x.state(n + 1))
            .map(|(u, v)| {
                if u.is_finite() {
                    (u - v) * (u - v)
                } else {
                    f64::INFINITY
                }
            })
            .sum::<f64>();
    }
    Ok(s)
}

/// Gaussian log-likelihood of the orbit under `A` with noise level `σ`.
pub fn loglik(a: &TropicalMatrix, x: &TimeSeries, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(TropError::InvalidArgument(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    let r = frob_residual_sq(a, x)?;
    let nd = (x.steps() * x.dim()) as f64;
    let var = sigma * sigma;
    Ok(-0.5 * nd * (2.0 * std::f64::consts::PI * var).ln() - r / (2.0 * var))
}

/// `S_kj`: number of transitions `n` at which `a_kj + x_j(n)` attains the
/// maximum in `(A ⊗ x(n))_k`, ties counted for every attaining `j`.
pub fn evidence_matrix(a: &TropicalMatrix, x: &TimeSeries) -> Result<Vec<Vec<usize>>> {
    let d = x.dim();
    if a.shape() != (d, d) {
        return Err(TropError::DimensionMismatch(format!(
            "A is {}x{}, series has dimension {d}",
            a.rows(),
            a.cols()
        )));
    }
    let mut s = vec![vec![0usize; d]; d];
    for n in 0..x.steps() {
        let p = a.matvec(x.state(n))?;
        for k in 0..d {
            if !p[k].is_finite() {
                continue;
            }
            for (j, count) in s[k].iter_mut().enumerate() {
                if a.get(k, j) + x.state(n)[j] == p[k] {
                    *count += 1;
                }
            }
        }
    }
    Ok(s)
}

/// Settings for [`sysid_fit`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SysIdConfig {
    /// Row solver for `λ = 0`, and the warm start for `λ > 0`.
    pub newton: NewtonConfig,
    pub irsls: IrslsConfig,
    /// Noise level used for the reported log-likelihood.
    pub sigma: Option<f64>,
}

/// Fitted system matrix and diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SysIdResult {
    pub a_hat: TropicalMatrix,
    pub frob_residual_sq: f64,
    /// `‖A(k,:) ⊗ X(:, 0..N) - X(k, 1..=N)‖²₂` per row; sums to
    /// `frob_residual_sq`.
    pub row_residual_sq: Vec<f64>,
    pub evidence: Vec<Vec<usize>>,
    pub loglik: Option<f64>,
}

/// Fits `A` row by row: row `k` regresses `x_k(n+1)` on `x(n)`.
///
/// With `λ > 0` each row is first fitted unpenalized and then refined by
/// IRSLS from that fit. Rows are solved in parallel.
pub fn sysid_fit(x: &TimeSeries, lambda: f64, config: &SysIdConfig) -> Result<SysIdResult> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(TropError::InvalidArgument(format!(
            "lambda must be non-negative, got {lambda}"
        )));
    }
    let design = x.design();
    let d = x.dim();
    let rows: Vec<Vec<f64>> = (0..d)
        .into_par_iter()
        .map(|k| {
            let y = x.targets(k);
            let problem = RegressionProblem::new(design.clone(), y.clone())?;
            let fit = multistart_newton(&problem, &config.newton)?;
            if lambda == 0.0 {
                return Ok(fit.x);
            }
            Ok(irsls(&design, &y, lambda, &fit.x, &config.irsls)?.x)
        })
        .collect::<Result<_>>()?;
    let a_hat = TropicalMatrix::from_rows(&rows, Semiring::MaxPlus)?;
    let mut row_residual_sq = vec![0.0; d];
    for n in 0..x.steps() {
        let p = a_hat.matvec(x.state(n))?;
        for k in 0..d {
            let e = p[k] - x.state(n + 1)[k];
            row_residual_sq[k] += if p[k].is_finite() {
                e * e
            } else {
                f64::INFINITY
            };
        }
    }
    let frob_residual_sq = frob_residual_sq(&a_hat, x)?;
    let evidence = evidence_matrix(&a_hat, x)?;
    let loglik = config.sigma.map(|s| loglik(&a_hat, x, s)).transpose()?;
    Ok(SysIdResult {
        a_hat,
        frob_residual_sq,
        row_residual_sq,
        evidence,
        loglik,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(v: f64) -> TropicalMatrix {
        TropicalMatrix::from_rows(&[[v]], Semiring::MaxPlus).unwrap()
    }

    #[test]
    fn deterministic_orbit() {
        let x = simulate_orbit(&scalar(2.0), &[0.0], 3, 0.0, 0).unwrap();
        let v: Vec<f64> = x.states().iter().map(|s| s[0]).collect();
        assert_eq!(v, vec![0.0, 2.0, 4.0, 6.0]);
    }

    #[test]
    fn orbit_is_seeded() {
        let m = TropicalMatrix::from_rows(&[[0.0, 1.0], [2.0, -1.0]], Semiring::MaxPlus).unwrap();
        let a = simulate_orbit(&m, &[0.0, 0.0], 10, 1.0, 7).unwrap();
        let b = simulate_orbit(&m, &[0.0, 0.0], 10, 1.0, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn noise_free_scalar_fit() {
        let x = simulate_orbit(&scalar(2.0), &[0.0], 5, 0.0, 0).unwrap();
        let r = sysid_fit(&x, 0.0, &SysIdConfig::default()).unwrap();
        assert_eq!(r.a_hat, scalar(2.0));
        assert_eq!(r.frob_residual_sq, 0.0);
        assert_eq!(r.evidence, vec![vec![5]]);
    }

    #[test]
    fn loglik_of_perfect_fit() {
        let x = simulate_orbit(&scalar(1.0), &[0.0], 4, 0.0, 0).unwrap();
        let l = loglik(&scalar(1.0), &x, 2.0).unwrap();
        let want = -0.5 * 4.0 * (2.0 * std::f64::consts::PI * 4.0).ln();
        assert!((l - want).abs() < 1e-12);
        assert!(loglik(&scalar(1.5), &x, 2.0).unwrap() < l);
    }

    #[test]
    fn short_series_rejected() {
        assert!(TimeSeries::new(vec![vec![0.0]]).is_err());
    }
}
