use super::{Norm, RegressionProblem, RegressionSolution, SolveStatus};
use crate::error::{Result, TropError};
use crate::matrix::TropicalMatrix;
use crate::pattern::{
    feasibility_matrix_rows, interior_point, set_is_finite, zero_cycle_mean, Pattern,
    PatternGeometry,
};

/// Default soft cap on `n + d` for exhaustive searches.
pub const DEFAULT_EXACT_CAP: usize = 14;

/// Depth-first walk over partial patterns `(P_0, …, P_k)`, pruning any
/// prefix whose feasibility matrix has a positive cycle. `visit` sees every
/// feasible full pattern in lexicographic order (subsets by bitmask).
fn walk(a: &TropicalMatrix, visit: &mut dyn FnMut(&Pattern) -> Result<()>) -> Result<()> {
    let (n, d) = (a.rows(), a.cols());
    let choices: Vec<Vec<Vec<usize>>> = (0..n)
        .map(|i| {
            (1usize..(1 << d))
                .map(|mask| (0..d).filter(|&j| mask >> j & 1 == 1).collect::<Vec<_>>())
                .filter(|s| set_is_finite(a.row(i), s))
                .collect()
        })
        .collect();
    let mut prefix: Vec<Vec<usize>> = Vec::with_capacity(n);
    descend(a, &choices, &mut prefix, visit)
}

fn descend(
    a: &TropicalMatrix,
    choices: &[Vec<Vec<usize>>],
    prefix: &mut Vec<Vec<usize>>,
    visit: &mut dyn FnMut(&Pattern) -> Result<()>,
) -> Result<()> {
    let k = prefix.len();
    if k == choices.len() {
        let p = Pattern::new(prefix.clone(), a.cols())?;
        return visit(&p);
    }
    for s in &choices[k] {
        prefix.push(s.clone());
        if zero_cycle_mean(&feasibility_matrix_rows(a, prefix)) {
            descend(a, choices, prefix, visit)?;
        }
        prefix.pop();
    }
    Ok(())
}

fn check_cap(a: &TropicalMatrix, cap: usize) -> Result<()> {
    if a.rows() + a.cols() > cap {
        return Err(TropError::CapExceeded(format!(
            "exhaustive search needs n + d <= {cap}, got {} + {}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(())
}

/// All feasible patterns of `a`, in search order.
pub fn feasible_patterns(a: &TropicalMatrix, cap: usize) -> Result<Vec<Pattern>> {
    check_cap(a, cap)?;
    let mut out = Vec::new();
    walk(a, &mut |p| {
        out.push(p.clone());
        Ok(())
    })?;
    Ok(out)
}

/// Global 2-norm optimum by exhaustive search over feasible patterns.
///
/// Each feasible leaf contributes its normal projection when admissible; the
/// closest one wins, earliest in search order on ties. The returned `x` is
/// `-inf` on columns outside the winning pattern's support.
pub fn brute_force_exact(problem: &RegressionProblem, cap: usize) -> Result<RegressionSolution> {
    let (a, y) = (problem.a(), problem.y());
    check_cap(a, cap)?;
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut leaves = 0usize;
    walk(a, &mut |p| {
        leaves += 1;
        let geom = PatternGeometry::new(a, p)?;
        let anchor = interior_point(a, p)?;
        if !geom.admissible(a, y, &anchor) {
            return Ok(());
        }
        let phi = geom.phi(a, y, &anchor);
        let r: f64 = phi.iter().zip(y).map(|(u, v)| (u - v) * (u - v)).sum();
        if best.as_ref().is_none_or(|(b, _)| r < *b) {
            let off = vec![f64::NEG_INFINITY; a.cols()];
            best = Some((r, geom.psi(a, y, &anchor, &off)));
        }
        Ok(())
    })?;
    let (_, x) = best.expect("some feasible pattern is always admissible");
    let residual = problem.residual(&x, Norm::Two)?;
    Ok(RegressionSolution {
        x,
        residual,
        iterations: leaves,
        status: SolveStatus::Optimal,
        trace: None,
        penalized_objective: None,
    })
}
