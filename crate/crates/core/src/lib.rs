//! Tropical (max-plus / min-plus) linear algebra with regression,
//! factorization and inverse-problem tooling.
//!
//! Matrices are dense [`TropicalMatrix`] values tagged with a [`Semiring`].
//! Regression solvers work in max-plus; factorization works in min-plus and
//! reaches the regression solvers through entrywise negation.

pub mod applications;
pub mod error;
pub mod factorization;
pub mod matrix;
pub mod oracles;
pub mod pattern;
pub mod regression;
pub mod textio;

pub use error::{Result, TropError};
pub use matrix::{CycleMean, Semiring, TropicalMatrix};
pub use pattern::{Classes, Pattern, PatternGeometry, ProjectionResult};
pub use regression::{
    NewtonConfig, RegressionProblem, RegressionSolution, SolveStatus, SteepestLimits,
};
