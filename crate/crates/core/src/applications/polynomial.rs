use crate::error::{Result, TropError};
use crate::matrix::{Semiring, TropicalMatrix};
use crate::regression::{multistart_newton, NewtonConfig, RegressionProblem, RegressionSolution};

/// `p(x) = max_j (a_j + S(j,:)·x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialSpec {
    /// `k × m` slopes, one monomial per row.
    pub slopes: Vec<Vec<f64>>,
    /// `k` coefficients.
    pub coeffs: Vec<f64>,
}

impl PolynomialSpec {
    pub fn new(slopes: Vec<Vec<f64>>, coeffs: Vec<f64>) -> Result<Self> {
        check_slopes(&slopes)?;
        if coeffs.len() != slopes.len() {
            return Err(TropError::DimensionMismatch(format!(
                "{} coefficients for {} monomials",
                coeffs.len(),
                slopes.len()
            )));
        }
        Ok(Self { slopes, coeffs })
    }
}

fn check_slopes(slopes: &[Vec<f64>]) -> Result<usize> {
    let Some(first) = slopes.first() else {
        return Err(TropError::InvalidArgument(
            "need at least one monomial".into(),
        ));
    };
    let m = first.len();
    if slopes
        .iter()
        .any(|s| s.len() != m || s.iter().any(|v| !v.is_finite()))
    {
        return Err(TropError::InvalidArgument(
            "slopes must be finite rows of equal length".into(),
        ));
    }
    Ok(m)
}

fn dot(s: &[f64], x: &[f64]) -> f64 {
    s.iter().zip(x).map(|(u, v)| u * v).sum()
}

/// `X_ij = S(j,:)·x(i)` as a max-plus design matrix.
pub fn build_design(points: &[Vec<f64>], slopes: &[Vec<f64>]) -> Result<TropicalMatrix> {
    let m = check_slopes(slopes)?;
    if let Some(i) = points.iter().position(|p| p.len() != m) {
        return Err(TropError::DimensionMismatch(format!(
            "point {i} has {} coordinates, slopes have {m}",
            points[i].len()
        )));
    }
    let rows: Vec<Vec<f64>> = points
        .iter()
        .map(|p| slopes.iter().map(|s| dot(s, p)).collect())
        .collect();
    TropicalMatrix::from_rows(&rows, Semiring::MaxPlus)
}

pub fn poly_eval(spec: &PolynomialSpec, x: &[f64]) -> f64 {
    spec.coeffs
        .iter()
        .zip(&spec.slopes)
        .map(|(a, s)| dot(s, x) + a)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Fits the coefficients of a polynomial with fixed slopes by multistart
/// Newton on the induced linear regression.
pub fn poly_fit(
    points: &[Vec<f64>],
    y: &[f64],
    slopes: &[Vec<f64>],
    config: &NewtonConfig,
) -> Result<(PolynomialSpec, RegressionSolution)> {
    let design = build_design(points, slopes)?;
    let problem = RegressionProblem::new(design, y.to_vec())?;
    let sol = multistart_newton(&problem, config)?;
    let spec = PolynomialSpec::new(slopes.to_vec(), sol.x.clone())?;
    Ok((spec, sol))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad() -> Vec<Vec<f64>> {
        vec![vec![0.0], vec![1.0], vec![2.0]]
    }

    #[test]
    fn univariate_design() {
        let pts = vec![vec![-1.0], vec![0.0], vec![2.0]];
        let x = build_design(&pts, &quad()).unwrap();
        assert_eq!(
            x.to_rows(),
            vec![
                vec![0.0, -1.0, -2.0],
                vec![0.0, 0.0, 0.0],
                vec![0.0, 2.0, 4.0]
            ]
        );
        let c = build_design(&pts, &[vec![0.0]]).unwrap();
        assert!(c.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn evaluation_and_design_agree() {
        let spec = PolynomialSpec::new(quad(), vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(poly_eval(&spec, &[0.0]), 1.0);
        let pts: Vec<Vec<f64>> = (0..9).map(|i| vec![-1.3 + 0.37 * i as f64]).collect();
        let x = build_design(&pts, &spec.slopes).unwrap();
        let via = x.matvec(&spec.coeffs).unwrap();
        for (p, v) in pts.iter().zip(via) {
            assert_eq!(poly_eval(&spec, p), v);
        }
    }

    #[test]
    fn exact_data_is_interpolated() {
        let spec = PolynomialSpec::new(quad(), vec![0.0, 1.0, 0.0]).unwrap();
        let pts: Vec<Vec<f64>> = [-2.1, -0.7, 0.4, 1.3, 2.6]
            .iter()
            .map(|&v| vec![v])
            .collect();
        let y: Vec<f64> = pts.iter().map(|p| poly_eval(&spec, p)).collect();
        let (_, sol) = poly_fit(&pts, &y, &spec.slopes, &NewtonConfig::default()).unwrap();
        assert!(sol.residual < 1e-9, "{}", sol.residual);
    }
}
