//! Inverse problems built on the regression and factorization solvers:
//! system identification, network distance reduction and max-plus
//! polynomial fitting.

mod network;
mod polynomial;
mod sysid;

pub use network::{network_reduce, parse_edge_list, shortest_paths, Edge, NetworkReduction};
pub use polynomial::{build_design, poly_eval, poly_fit, PolynomialSpec};
pub use sysid::{
    evidence_matrix, frob_residual_sq, loglik, simulate_orbit, sysid_fit, SysIdConfig, SysIdResult,
    TimeSeries,
};
