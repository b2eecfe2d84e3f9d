use super::{Norm, RegressionProblem, RegressionSolution, SolveStatus};
use crate::error::{Result, TropError};
use crate::matrix::TropicalMatrix;
use crate::pattern::{compute_pattern_tol, equivalence_classes, Classes, Pattern};

/// Tie tolerance used when reading `pattern(x)` off a computed iterate.
pub const DEFAULT_TIE_TOL: f64 = 1e-9;

/// Budgets for [`steepest_descent`].
#[derive(Debug, Clone, PartialEq)]
pub struct SteepestLimits {
    /// Maximum number of smooth segments.
    pub max_segments: usize,
    /// Largest number of candidate patterns examined at one point.
    pub enumeration_cap: usize,
    pub tie_tol: f64,
    /// The descent field counts as zero below this Euclidean norm.
    pub grad_tol: f64,
    pub record_trace: bool,
}

impl Default for SteepestLimits {
    fn default() -> Self {
        Self {
            max_segments: 1000,
            enumeration_cap: 4096,
            tie_tol: DEFAULT_TIE_TOL,
            grad_tol: 1e-10,
            record_trace: false,
        }
    }
}

/// Restricted gradient of the local residual and its admissibility.
#[derive(Debug, Clone, PartialEq)]
pub struct Subgradient {
    pub grad: Vec<f64>,
    /// Whether `x - μ∇` stays in the domain of the pattern for small `μ > 0`.
    pub admissible: bool,
}

struct Local {
    classes: Classes,
    /// Per-class residual sums and row counts.
    sum: Vec<f64>,
    rows: Vec<usize>,
    grad: Vec<f64>,
}

fn local(a: &TropicalMatrix, y: &[f64], x: &[f64], p: &Pattern) -> Local {
    let classes = equivalence_classes(p);
    let m = classes.count();
    let mut sum = vec![0.0; m];
    let mut rows = vec![0usize; m];
    for (i, &l) in classes.ell.iter().enumerate() {
        let c = classes.class_of[l];
        sum[c] += a.get(i, l) + x[l] - y[i];
        rows[c] += 1;
    }
    let grad = (0..p.d())
        .map(|j| {
            let c = classes.class_of[j];
            if rows[c] == 0 {
                0.0
            } else {
                sum[c] / classes.members[c].len() as f64
            }
        })
        .collect();
    Local {
        classes,
        sum,
        rows,
        grad,
    }
}

/// `∇_j < ∇_k` whenever `j ∈ P_i` and `k ∈ Q_i \ P_i`.
fn admissible(grad: &[f64], p: &Pattern, q: &Pattern) -> bool {
    p.sets().iter().zip(q.sets()).all(|(ps, qs)| {
        let gj = grad[ps[0]];
        qs.iter()
            .filter(|k| ps.binary_search(k).is_err())
            .all(|&k| gj < grad[k])
    })
}

/// `∇(x, P)` for `P ⪯ pattern(x)`, with ties in `pattern(x)` read at
/// [`DEFAULT_TIE_TOL`].
pub fn subgradient(a: &TropicalMatrix, y: &[f64], x: &[f64], p: &Pattern) -> Result<Subgradient> {
    let q = compute_pattern_tol(a, x, DEFAULT_TIE_TOL)?;
    if y.len() != a.rows() {
        return Err(TropError::DimensionMismatch(format!(
            "y has length {}, expected {}",
            y.len(),
            a.rows()
        )));
    }
    if !p.preceq(&q) {
        return Err(TropError::InvalidArgument(format!(
            "pattern {p} is not below pattern(x) = {q}"
        )));
    }
    let grad = local(a, y, x, p).grad;
    let admissible = admissible(&grad, p, &q);
    Ok(Subgradient { grad, admissible })
}

/// Every `P ⪯ q`, rows varying slowest first, subsets in bitmask order.
/// `None` when the count exceeds `cap`.
fn sub_patterns(q: &Pattern, cap: usize) -> Option<Vec<Pattern>> {
    let mut total: usize = 1;
    for s in q.sets() {
        let choices = (1usize << s.len().min(62)) - 1;
        total = total.checked_mul(choices)?;
        if total > cap {
            return None;
        }
    }
    let n = q.n();
    let radix: Vec<usize> = q.sets().iter().map(|s| (1 << s.len()) - 1).collect();
    let mut digits = vec![0usize; n];
    let mut out = Vec::with_capacity(total);
    loop {
        let sets = (0..n)
            .map(|i| {
                let mask = digits[i] + 1;
                q.row(i)
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| mask >> b & 1 == 1)
                    .map(|(_, &j)| j)
                    .collect()
            })
            .collect();
        out.push(Pattern::new(sets, q.d()).expect("subsets of a valid pattern"));
        let mut i = n;
        loop {
            if i == 0 {
                return Some(out);
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < radix[i] {
                break;
            }
            digits[i] = 0;
        }
    }
}

struct Flow {
    delta: Vec<f64>,
    rate: Vec<f64>,
}

impl Flow {
    fn new(loc: &Local, d: usize) -> Self {
        let mut delta = vec![0.0; d];
        let mut rate = vec![0.0; d];
        for j in 0..d {
            let c = loc.classes.class_of[j];
            if loc.rows[c] > 0 {
                delta[j] = -loc.sum[c] / loc.rows[c] as f64;
                rate[j] = loc.rows[c] as f64 / loc.classes.members[c].len() as f64;
            }
        }
        Self { delta, rate }
    }

    fn offset(&self, j: usize, t: f64) -> f64 {
        if t == f64::INFINITY {
            self.delta[j]
        } else {
            -self.delta[j] * (-self.rate[j] * t).exp_m1()
        }
    }
}

/// First `t > 0` at which `g0 + Δ_k(1-e^{-r_k t}) - Δ_l(1-e^{-r_l t})`
/// reaches zero from below, searched on `[0, t_max]`.
fn crossing(g0: f64, dk: f64, rk: f64, dl: f64, rl: f64, t_max: f64) -> Option<f64> {
    let g = |t: f64| g0 - dk * (-rk * t).exp_m1() + dl * (-rl * t).exp_m1();
    let mut cuts = vec![0.0];
    let (sk, sl) = (dk * rk, dl * rl);
    if rk != rl && sk != 0.0 && sl != 0.0 && (sk > 0.0) == (sl > 0.0) {
        let tc = (sk / sl).ln() / (rk - rl);
        if tc > 0.0 && tc < t_max {
            cuts.push(tc);
        }
    }
    cuts.push(t_max);
    for w in cuts.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        if !(g(lo) < 0.0 && g(hi) >= 0.0) {
            continue;
        }
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid) >= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        return Some(hi);
    }
    None
}

/// Exit time of the flow from the domain of `p`; `inf` if it never leaves.
fn exit_time(a: &TropicalMatrix, x: &[f64], p: &Pattern, q: &Pattern, flow: &Flow) -> f64 {
    let min_rate = flow
        .rate
        .iter()
        .zip(&flow.delta)
        .filter(|(&r, &dl)| r > 0.0 && dl != 0.0)
        .map(|(&r, _)| r)
        .fold(f64::INFINITY, f64::min);
    if min_rate == f64::INFINITY {
        return f64::INFINITY;
    }
    let t_max = 50.0 / min_rate;
    let mut best = f64::INFINITY;
    for (i, ps) in p.sets().iter().enumerate() {
        let l = ps[0];
        let row = a.row(i);
        for (k, &aik) in row.iter().enumerate() {
            if aik == f64::NEG_INFINITY || ps.binary_search(&k).is_ok() {
                continue;
            }
            let (dk, dl) = (flow.delta[k], flow.delta[l]);
            if dk == 0.0 && dl == 0.0 {
                continue;
            }
            let g0 = if q.row(i).binary_search(&k).is_ok() {
                0.0
            } else {
                aik + x[k] - row[l] - x[l]
            };
            if let Some(t) = crossing(g0, dk, flow.rate[k], dl, flow.rate[l], t_max) {
                best = best.min(t);
            }
        }
    }
    best
}

/// Follows the steepest descent path from `x0` as a chain of closed-form
/// exponential segments, stopping where no admissible direction descends.
pub fn steepest_descent(
    problem: &RegressionProblem,
    x0: &[f64],
    limits: &SteepestLimits,
) -> Result<RegressionSolution> {
    if x0.len() != problem.d() || x0.iter().any(|v| !v.is_finite()) {
        return Err(TropError::InvalidArgument(format!(
            "x0 must be a finite vector of length {}",
            problem.d()
        )));
    }
    let (a, y) = (problem.a(), problem.y());
    let d = problem.d();
    let mut x = x0.to_vec();
    let mut trace = limits.record_trace.then(|| {
        vec![(
            x.clone(),
            problem.residual(&x, Norm::Two).unwrap_or(f64::NAN),
        )]
    });
    let mut fallback = false;
    let mut segments = 0;
    let status = loop {
        let q = compute_pattern_tol(a, &x, limits.tie_tol)?;
        let candidates = match sub_patterns(&q, limits.enumeration_cap) {
            Some(c) => c,
            None => {
                fallback = true;
                vec![q.clone()]
            }
        };
        let mut chosen: Option<(Pattern, Local, f64)> = None;
        for p in candidates {
            let loc = local(a, y, &x, &p);
            if !admissible(&loc.grad, &p, &q) {
                continue;
            }
            let norm_sq: f64 = loc.grad.iter().map(|g| g * g).sum();
            if chosen.as_ref().is_none_or(|(_, _, b)| norm_sq > *b) {
                chosen = Some((p, loc, norm_sq));
            }
        }
        let (p, loc, norm_sq) = chosen.expect("pattern(x) itself is always admissible");
        if norm_sq.sqrt() <= limits.grad_tol {
            break if fallback {
                SolveStatus::LocalFallback
            } else {
                SolveStatus::Local
            };
        }
        if segments == limits.max_segments {
            break SolveStatus::IterationCap;
        }
        let flow = Flow::new(&loc, d);
        let t = exit_time(a, &x, &p, &q, &flow);
        for (j, xj) in x.iter_mut().enumerate() {
            *xj += flow.offset(j, t);
        }
        segments += 1;
        if let Some(tr) = trace.as_mut() {
            tr.push((x.clone(), problem.residual(&x, Norm::Two)?));
        }
    };
    let residual = problem.residual(&x, Norm::Two)?;
    Ok(RegressionSolution {
        x,
        residual,
        iterations: segments,
        status,
        trace,
        penalized_objective: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Semiring;

    fn example3() -> RegressionProblem {
        let a = TropicalMatrix::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], Semiring::MaxPlus)
            .unwrap();
        RegressionProblem::new(a, vec![0.0, 0.5, 0.0]).unwrap()
    }

    fn pat(sets: &[&[usize]]) -> Pattern {
        Pattern::new(sets.iter().map(|s| s.to_vec()).collect(), 2).unwrap()
    }

    #[test]
    fn subgradient_reference() {
        let p = example3();
        let g = subgradient(p.a(), p.y(), &[0.0, 0.0], &pat(&[&[0], &[0], &[1]])).unwrap();
        assert_eq!(g.grad, vec![0.5, 1.0]);
        assert!(g.admissible);
        let full = subgradient(p.a(), p.y(), &[0.0, 0.0], &pat(&[&[0, 1], &[0], &[1]])).unwrap();
        assert!(full.admissible);
        let other = subgradient(p.a(), p.y(), &[0.0, 0.0], &pat(&[&[1], &[0], &[1]])).unwrap();
        assert_eq!(other.grad, vec![0.5, 1.0]);
        assert!(!other.admissible);
    }

    #[test]
    fn subgradient_vanishes_on_interpolation() {
        let p = example3();
        let x = [0.3, -0.4];
        let y = p.a().matvec(&x).unwrap();
        let q = compute_pattern_tol(p.a(), &x, 0.0).unwrap();
        let g = subgradient(p.a(), &y, &x, &q).unwrap();
        assert!(g.grad.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn subpattern_enumeration() {
        let q = pat(&[&[0, 1], &[0], &[1]]);
        let all = sub_patterns(&q, 10).unwrap();
        assert_eq!(all.len(), 3);
        assert_eq!(all[0], pat(&[&[0], &[0], &[1]]));
        assert!(all.iter().all(|p| p.preceq(&q)));
        assert!(sub_patterns(&q, 2).is_none());
    }

    #[test]
    fn single_segment_from_interior() {
        let p = example3();
        let s = steepest_descent(&p, &[0.5, 0.0], &SteepestLimits::default()).unwrap();
        assert_eq!(s.iterations, 1);
        assert!((s.x[0] + 0.25).abs() < 1e-15 && (s.x[1] + 1.0).abs() < 1e-15);
        assert_eq!(s.status, SolveStatus::Local);
    }

    #[test]
    fn zero_gradient_returns_immediately() {
        let p = example3();
        let s = steepest_descent(&p, &[-0.25, -1.0], &SteepestLimits::default()).unwrap();
        assert_eq!(s.iterations, 0);
    }

    #[test]
    fn crossing_matches_dense_sampling() {
        let cases = [
            (-0.5, 1.0, 1.0, -2.0, 3.0),
            (0.0, -1.0, 2.0, -3.0, 0.5),
            (-1.0, 2.0, 0.7, 0.5, 0.7),
            (-0.2, -0.1, 1.0, 0.3, 4.0),
        ];
        for (g0, dk, rk, dl, rl) in cases {
            let g = |t: f64| g0 + dk * (1.0 - (-rk * t).exp()) - dl * (1.0 - (-rl * t).exp());
            let tmax = 50.0;
            let found = crossing(g0, dk, rk, dl, rl, tmax);
            let step = 1e-4;
            let sampled = (1..=(tmax / step) as usize)
                .map(|k| k as f64 * step)
                .find(|&t| g(t) >= 0.0);
            match (found, sampled) {
                (Some(t), Some(s)) => assert!((t - s).abs() < 2.0 * step, "{t} vs {s}"),
                (None, None) => {}
                other => panic!("mismatch {other:?} for {:?}", (g0, dk, rk, dl, rl)),
            }
        }
    }
}
