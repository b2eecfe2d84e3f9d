use super::{
    half_sq, polish, NewtonConfig, Norm, RegressionProblem, RegressionSolution, SolveStatus,
};
use crate::error::{Result, TropError};
use crate::matrix::{Semiring, TropicalMatrix};

/// Settings for iteratively reshifted least squares.
#[derive(Debug, Clone, PartialEq)]
pub struct IrslsConfig {
    /// Inner solver; only `mu`, `polish_mu`, `stall` and `max_iter` are used.
    pub newton: NewtonConfig,
    /// Stop once `‖x - x_prev‖_∞` falls below this.
    pub tol: f64,
    pub max_outer: usize,
    /// A coordinate is sent to `-inf` once it falls this many multiples of
    /// `λ` below its start value or below `min(y) - range(A)`.
    pub divergence_factor: f64,
}

impl Default for IrslsConfig {
    fn default() -> Self {
        Self {
            newton: NewtonConfig::default(),
            tol: 1e-10,
            max_outer: 500,
            divergence_factor: 40.0,
        }
    }
}

/// `‖A ⊗ x - y‖²₂ + λ Σ_{x_j finite} x_j`.
///
/// Coordinates at `-inf` contribute nothing, so sending a coordinate to
/// `-inf` raises this value by `-λ x_j`.
pub fn penalized_objective(a: &TropicalMatrix, y: &[f64], x: &[f64], lambda: f64) -> f64 {
    let fit = 2.0 * half_sq(a, x, y);
    fit + lambda * x.iter().filter(|v| v.is_finite()).sum::<f64>()
}

fn finite_range(a: &TropicalMatrix) -> f64 {
    let (lo, hi) = a
        .as_slice()
        .iter()
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
            (l.min(v), h.max(v))
        });
    if hi >= lo {
        hi - lo
    } else {
        0.0
    }
}

/// Stacks `[A_act; I]` over the active columns with targets
/// `[y; x_prev - λ/2]`.
fn stacked(
    a: &TropicalMatrix,
    y: &[f64],
    active: &[usize],
    shift: &[f64],
) -> Result<RegressionProblem> {
    let (n, k) = (a.rows(), active.len());
    let mut data = Vec::with_capacity((n + k) * k);
    for i in 0..n {
        data.extend(active.iter().map(|&j| a.get(i, j)));
    }
    for r in 0..k {
        data.extend((0..k).map(|c| if c == r { 0.0 } else { f64::NEG_INFINITY }));
    }
    let big = TropicalMatrix::new(n + k, k, data, Semiring::MaxPlus)?;
    let mut target = y.to_vec();
    target.extend_from_slice(shift);
    RegressionProblem::new(big, target)
}

/// Whether every row of `A ⊗ x` still has a finite term.
fn rows_survive(a: &TropicalMatrix, x: &[f64]) -> bool {
    (0..a.rows()).all(|i| {
        a.row(i)
            .iter()
            .zip(x)
            .any(|(&aij, &xj)| aij.is_finite() && xj.is_finite())
    })
}

/// Penalized regression `min ‖A ⊗ x - y‖²₂ + λ Σ x_j` by a sequence of
/// stacked unpenalized problems, each warm-started at the previous iterate.
///
/// A coordinate that keeps falling is fixed at `-inf`, unless doing so would
/// leave some row of `A ⊗ x` without a finite term.
pub fn irsls(
    a: &TropicalMatrix,
    y: &[f64],
    lambda: f64,
    x0: &[f64],
    config: &IrslsConfig,
) -> Result<RegressionSolution> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(TropError::InvalidArgument(format!(
            "lambda must be finite and non-negative, got {lambda}"
        )));
    }
    let base = RegressionProblem::new(a.clone(), y.to_vec())?;
    if x0.len() != a.cols() || x0.iter().any(|v| !v.is_finite()) {
        return Err(TropError::InvalidArgument(format!(
            "x0 must be a finite vector of length {}",
            a.cols()
        )));
    }
    config.newton.validate()?;
    let floor = y.iter().copied().fold(f64::INFINITY, f64::min)
        - finite_range(a)
        - config.divergence_factor * lambda;
    let mut x = x0.to_vec();
    let mut outer = 0;
    let status = loop {
        if outer == config.max_outer {
            break SolveStatus::IterationCap;
        }
        let active: Vec<usize> = (0..x.len()).filter(|&j| x[j].is_finite()).collect();
        let shift: Vec<f64> = active.iter().map(|&j| x[j] - lambda / 2.0).collect();
        let sub = stacked(a, y, &active, &shift)?;
        let start: Vec<f64> = active.iter().map(|&j| x[j]).collect();
        let sol = polish(&sub, &config.newton, &start)?;
        outer += 1;
        let mut next = x.clone();
        for (&j, &v) in active.iter().zip(&sol.x) {
            next[j] = v;
        }
        let mut killed = false;
        if lambda > 0.0 {
            for &j in &active {
                let v = next[j];
                if v < x0[j] - config.divergence_factor * lambda || v < floor {
                    let old = next[j];
                    next[j] = f64::NEG_INFINITY;
                    if rows_survive(a, &next) {
                        killed = true;
                    } else {
                        next[j] = old;
                    }
                }
            }
        }
        let step = active
            .iter()
            .filter(|&&j| next[j].is_finite())
            .map(|&j| (next[j] - x[j]).abs())
            .fold(0.0, f64::max);
        x = next;
        if !killed && step < config.tol {
            break SolveStatus::Local;
        }
    };
    let residual = base.residual(&x, Norm::Two)?;
    Ok(RegressionSolution {
        penalized_objective: Some(penalized_objective(a, y, &x, lambda)),
        x,
        residual,
        iterations: outer,
        status,
        trace: None,
    })
}
