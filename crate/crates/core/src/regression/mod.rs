//! Max-plus linear regression: `min_x ‖A ⊗ x - y‖_p` for `p ∈ {2, ∞}`.
//!
//! * [`solve_inf`]: closed-form optimum for the ∞-norm.
//! * [`newton_solve`] / [`multistart_newton`]: Newton iteration on the
//!   piecewise-quadratic 2-norm residual, with undershooting.
//! * [`steepest_descent`]: piecewise-smooth steepest descent path.
//! * [`brute_force_exact`]: exhaustive pattern search, exact for small sizes.
//! * [`irsls`]: penalized regression `‖A ⊗ x - y‖²₂ + λ Σ x_j`.

mod exact;
mod irsls;
mod newton;
mod steepest;

use std::fmt;

use crate::error::{Result, TropError};
use crate::matrix::{Semiring, TropicalMatrix};

pub use exact::{brute_force_exact, feasible_patterns, DEFAULT_EXACT_CAP};
pub use irsls::{irsls, penalized_objective, IrslsConfig};
pub use newton::{multistart_newton, newton_solve, newton_step, polish, NewtonConfig};
pub use steepest::{steepest_descent, subgradient, SteepestLimits, Subgradient};

/// Norm used to measure `A ⊗ x - y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    Inf,
    Two,
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::Inf => "inf",
            Norm::Two => "two",
        })
    }
}

/// How a solver stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Globally optimal.
    Optimal,
    /// Stationary for the method (fixed point or zero descent field).
    Local,
    /// Best residual stopped improving before reaching a fixed point.
    Stalled,
    /// Iteration budget exhausted.
    IterationCap,
    /// Steepest descent finished, but some step skipped the full pattern
    /// enumeration because of the enumeration cap.
    LocalFallback,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Local => "local",
            SolveStatus::Stalled => "stalled",
            SolveStatus::IterationCap => "iteration-cap",
            SolveStatus::LocalFallback => "local-fallback",
        })
    }
}

/// A max-plus regression instance `(A, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionProblem {
    a: TropicalMatrix,
    y: Vec<f64>,
}

impl RegressionProblem {
    pub fn new(a: TropicalMatrix, y: Vec<f64>) -> Result<Self> {
        if a.semiring() != Semiring::MaxPlus {
            return Err(TropError::SemiringMismatch {
                left: a.semiring().name(),
                right: Semiring::MaxPlus.name(),
            });
        }
        if y.len() != a.rows() {
            return Err(TropError::DimensionMismatch(format!(
                "A has {} rows but y has length {}",
                a.rows(),
                y.len()
            )));
        }
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(TropError::InvalidArgument(format!("y[{i}] is not finite")));
        }
        if let Some(i) = (0..a.rows()).find(|&i| a.row(i).iter().all(|v| !v.is_finite())) {
            return Err(TropError::DegenerateRow { row: i });
        }
        Ok(Self { a, y })
    }

    pub fn a(&self) -> &TropicalMatrix {
        &self.a
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn d(&self) -> usize {
        self.a.cols()
    }

    /// `‖A ⊗ x - y‖` in the given norm.
    pub fn residual(&self, x: &[f64], norm: Norm) -> Result<f64> {
        residual(&self.a, x, &self.y, norm)
    }

    /// `‖A ⊗ x - y‖²₂ / 2`, `+inf` when a row evaluates to `-inf`.
    pub(crate) fn half_sq(&self, x: &[f64]) -> f64 {
        half_sq(&self.a, x, &self.y)
    }
}

pub(crate) fn half_sq(a: &TropicalMatrix, x: &[f64], y: &[f64]) -> f64 {
    let mut s = 0.0;
    for (i, &yi) in y.iter().enumerate() {
        let v = a
            .row(i)
            .iter()
            .zip(x)
            .fold(f64::NEG_INFINITY, |m, (&aij, &xj)| {
                if aij == f64::NEG_INFINITY || xj == f64::NEG_INFINITY {
                    m
                } else {
                    m.max(aij + xj)
                }
            });
        if v == f64::NEG_INFINITY {
            return f64::INFINITY;
        }
        s += (v - yi) * (v - yi);
    }
    s / 2.0
}

/// Solver output.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionSolution {
    /// Entries may be `-inf` after regularization or exact search.
    pub x: Vec<f64>,
    /// `‖A ⊗ x - y‖_p` for the norm the solver targets.
    pub residual: f64,
    pub iterations: usize,
    pub status: SolveStatus,
    /// `(iterate, residual)` pairs when tracing is enabled.
    pub trace: Option<Vec<(Vec<f64>, f64)>>,
    /// `‖A ⊗ x - y‖²₂ + λ Σ x_j` for penalized solves.
    pub penalized_objective: Option<f64>,
}

/// `‖A ⊗ x - y‖_p`; `+inf` if any row of `A ⊗ x` is `-inf`.
pub fn residual(a: &TropicalMatrix, x: &[f64], y: &[f64], norm: Norm) -> Result<f64> {
    if y.len() != a.rows() {
        return Err(TropError::DimensionMismatch(format!(
            "A has {} rows but y has length {}",
            a.rows(),
            y.len()
        )));
    }
    let ax = a.matvec(x)?;
    if ax.contains(&f64::NEG_INFINITY) {
        return Ok(f64::INFINITY);
    }
    let diffs = ax.iter().zip(y).map(|(u, v)| (u - v).abs());
    Ok(match norm {
        Norm::Inf => diffs.fold(0.0, f64::max),
        Norm::Two => diffs.map(|e| e * e).sum::<f64>().sqrt(),
    })
}

/// Principal solution `x̂_j = min_i (y_i - a_ij)`, the largest `x` with
/// `A ⊗ x ≤ y`. Columns without finite entries give `-inf`.
pub fn principal_solution(a: &TropicalMatrix, y: &[f64]) -> Vec<f64> {
    (0..a.cols())
        .map(|j| {
            (0..a.rows())
                .filter(|&i| a.get(i, j).is_finite())
                .map(|i| y[i] - a.get(i, j))
                .fold(f64::INFINITY, f64::min)
        })
        .map(|v| {
            if v == f64::INFINITY {
                f64::NEG_INFINITY
            } else {
                v
            }
        })
        .collect()
}

/// Exact ∞-norm regression: `x* = x̂ ⊗ (α/2)` with `α = ‖A ⊗ x̂ - y‖_∞`.
///
/// `x*` is the largest element of the optimal set.
pub fn solve_inf(problem: &RegressionProblem) -> Result<RegressionSolution> {
    let a = problem.a();
    let xhat = principal_solution(a, problem.y());
    let alpha = residual(a, &xhat, problem.y(), Norm::Inf)?;
    let x: Vec<f64> = xhat
        .iter()
        .map(|&v| if v.is_finite() { v + alpha / 2.0 } else { v })
        .collect();
    let residual = residual(a, &x, problem.y(), Norm::Inf)?;
    Ok(RegressionSolution {
        x,
        residual,
        iterations: 1,
        status: SolveStatus::Optimal,
        trace: None,
        penalized_objective: None,
    })
}
