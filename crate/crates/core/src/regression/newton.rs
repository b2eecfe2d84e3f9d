use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::{solve_inf, Norm, RegressionProblem, RegressionSolution, SolveStatus};
use crate::error::{Result, TropError};
use crate::matrix::TropicalMatrix;

/// Parameters for Newton's method with undershooting.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonConfig {
    /// Step blend `x ← (1-μ)x + μN(x)` for the first pass, in `(0, 1]`.
    pub mu: f64,
    /// Blend for a second pass started from the first pass's answer.
    pub polish_mu: Option<f64>,
    /// Stop after this many iterations without a new best residual.
    pub stall: usize,
    pub max_iter: usize,
    pub starts: usize,
    pub seed: u64,
    pub record_trace: bool,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            mu: 1.0,
            polish_mu: Some(0.05),
            stall: 5,
            max_iter: 500,
            starts: 10,
            seed: 0,
            record_trace: false,
        }
    }
}

impl NewtonConfig {
    pub fn validate(&self) -> Result<()> {
        let ok_mu = |m: f64| m > 0.0 && m <= 1.0;
        if !ok_mu(self.mu) || !self.polish_mu.is_none_or(ok_mu) {
            return Err(TropError::InvalidArgument(format!(
                "undershoot factors must lie in (0, 1], got {} and {:?}",
                self.mu, self.polish_mu
            )));
        }
        if self.stall == 0 || self.max_iter == 0 || self.starts == 0 {
            return Err(TropError::InvalidArgument(
                "stall window, max_iter and starts must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Per-row minimal argmax index of `A ⊗ x`.
pub(crate) fn subpattern_of(a: &TropicalMatrix, x: &[f64]) -> Result<Vec<usize>> {
    (0..a.rows())
        .map(|i| {
            let mut best = f64::NEG_INFINITY;
            let mut arg = None;
            for (j, (&aij, &xj)) in a.row(i).iter().zip(x).enumerate() {
                if aij == f64::NEG_INFINITY || xj == f64::NEG_INFINITY {
                    continue;
                }
                if aij + xj > best {
                    best = aij + xj;
                    arg = Some(j);
                }
            }
            arg.ok_or(TropError::DegenerateRow { row: i })
        })
        .collect()
}

/// One Newton map evaluation `N(x) = Ψ(p(x), y, x)`.
///
/// For the singleton subpattern every column is its own class, so the
/// target for column `j` is the mean of `y_i - a_ij` over rows whose
/// subpattern picks `j`. Columns never picked keep their current value.
pub fn newton_step(a: &TropicalMatrix, y: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != a.cols() || y.len() != a.rows() {
        return Err(TropError::DimensionMismatch(format!(
            "A is {}x{}, x has length {}, y has length {}",
            a.rows(),
            a.cols(),
            x.len(),
            y.len()
        )));
    }
    let ell = subpattern_of(a, x)?;
    let mut sum = vec![0.0; a.cols()];
    let mut cnt = vec![0usize; a.cols()];
    for (i, &j) in ell.iter().enumerate() {
        sum[j] += y[i] - a.get(i, j);
        cnt[j] += 1;
    }
    Ok((0..a.cols())
        .map(|j| {
            if cnt[j] == 0 {
                x[j]
            } else {
                sum[j] / cnt[j] as f64
            }
        })
        .collect())
}

fn blend(x: &[f64], target: &[f64], mu: f64) -> Vec<f64> {
    x.iter()
        .zip(target)
        .map(|(&u, &v)| {
            if !u.is_finite() || !v.is_finite() {
                u.min(v)
            } else if mu == 1.0 {
                v
            } else {
                (1.0 - mu) * u + mu * v
            }
        })
        .collect()
}

fn is_fixed(a: &TropicalMatrix, y: &[f64], x: &[f64]) -> bool {
    match newton_step(a, y, x) {
        Ok(nx) => nx.iter().zip(x).all(|(&u, &v)| {
            u == v || (u.is_finite() && v.is_finite() && (u - v).abs() <= 1e-12 * (1.0 + v.abs()))
        }),
        Err(_) => false,
    }
}

/// Undershooting Newton iteration from `x0`, returning the best iterate.
///
/// The starting point counts as the first "best" candidate, so the result
/// is never worse than `x0`.
pub fn newton_solve(
    problem: &RegressionProblem,
    config: &NewtonConfig,
    x0: &[f64],
) -> Result<RegressionSolution> {
    config.validate()?;
    run(problem, config.mu, config, x0)
}

fn run(
    problem: &RegressionProblem,
    mu: f64,
    config: &NewtonConfig,
    x0: &[f64],
) -> Result<RegressionSolution> {
    if x0.len() != problem.d() {
        return Err(TropError::DimensionMismatch(format!(
            "x0 has length {}, expected {}",
            x0.len(),
            problem.d()
        )));
    }
    let (a, y) = (problem.a(), problem.y());
    let mut x = x0.to_vec();
    let mut best_x = x.clone();
    let mut best_r = problem.half_sq(&x);
    let mut trace = config
        .record_trace
        .then(|| vec![(x.clone(), (2.0 * best_r).sqrt())]);
    let mut since = 0;
    let mut iterations = 0;
    let mut capped = false;
    loop {
        if iterations == config.max_iter {
            capped = true;
            break;
        }
        let target = newton_step(a, y, &x)?;
        x = blend(&x, &target, mu);
        iterations += 1;
        let r = problem.half_sq(&x);
        if let Some(t) = trace.as_mut() {
            t.push((x.clone(), (2.0 * r).sqrt()));
        }
        // Equal residuals still move the best point: near a minimum the
        // objective is flat to rounding while the iterate keeps converging.
        if r <= best_r {
            best_x.clone_from(&x);
        }
        if r < best_r {
            best_r = r;
            since = 0;
        } else {
            since += 1;
            if since >= config.stall {
                break;
            }
        }
    }
    let status = if capped {
        SolveStatus::IterationCap
    } else if is_fixed(a, y, &best_x) {
        SolveStatus::Local
    } else {
        SolveStatus::Stalled
    };
    let residual = problem.residual(&best_x, Norm::Two)?;
    Ok(RegressionSolution {
        x: best_x,
        residual,
        iterations,
        status,
        trace,
        penalized_objective: None,
    })
}

/// A pass with `mu` followed, if configured, by a pass with `polish_mu`.
pub fn polish(
    problem: &RegressionProblem,
    config: &NewtonConfig,
    x0: &[f64],
) -> Result<RegressionSolution> {
    config.validate()?;
    let first = run(problem, config.mu, config, x0)?;
    let Some(mu2) = config.polish_mu else {
        return Ok(first);
    };
    let mut second = run(problem, mu2, config, &first.x)?;
    second.iterations += first.iterations;
    if let (Some(t1), Some(t2)) = (first.trace, second.trace.as_mut()) {
        let mut joined = t1;
        joined.extend(t2.drain(1..));
        *t2 = joined;
    }
    Ok(second)
}

/// Start points: the ∞-norm optimum, then Gaussian perturbations of it
/// scaled by its ∞-norm residual. Each start draws from its own stream.
pub(crate) fn start_points(
    problem: &RegressionProblem,
    starts: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let inf = solve_inf(problem)?;
    let scale = if inf.residual > 0.0 {
        inf.residual
    } else {
        1.0
    };
    Ok((0..starts)
        .map(|s| {
            if s == 0 {
                return inf.x.clone();
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s as u64);
            inf.x
                .iter()
                .map(|&v| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    if v.is_finite() {
                        v + scale * z
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect())
}

/// Best of `config.starts` polished Newton runs.
///
/// Starts run in parallel; the winner is the smallest residual, with ties
/// going to the lowest start index, so results do not depend on scheduling.
pub fn multistart_newton(
    problem: &RegressionProblem,
    config: &NewtonConfig,
) -> Result<RegressionSolution> {
    config.validate()?;
    let starts = start_points(problem, config.starts, config.seed)?;
    let runs: Vec<RegressionSolution> = starts
        .par_iter()
        .map(|x0| polish(problem, config, x0))
        .collect::<Result<_>>()?;
    let total: usize = runs.iter().map(|r| r.iterations).sum();
    let mut best = runs
        .into_iter()
        .reduce(|b, r| if r.residual < b.residual { r } else { b })
        .expect("at least one start");
    best.iterations = total;
    Ok(best)
}
