use crate::error::{Result, TropError};
use crate::factorization::{symmetric_factorize, FactorizationResult, SymmetricConfig};
use crate::matrix::{Semiring, TropicalMatrix};
use crate::textio::parse_token;

/// Undirected weighted edge between 0-based vertices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// Parses lines `u v [w]` (default weight 1); blank and `#` lines are
/// skipped. Returns the edges and the vertex count `max index + 1`.
pub fn parse_edge_list(text: &str) -> Result<(Vec<Edge>, usize)> {
    let mut edges = Vec::new();
    let mut n = 0;
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let bad = || TropError::Parse(format!("line {}: expected `u v [w]`", line_no + 1));
        if !(2..=3).contains(&toks.len()) {
            return Err(bad());
        }
        let u: usize = toks[0].parse().map_err(|_| bad())?;
        let v: usize = toks[1].parse().map_err(|_| bad())?;
        let w = match toks.get(2) {
            Some(t) => parse_token(t)?,
            None => 1.0,
        };
        n = n.max(u + 1).max(v + 1);
        edges.push(Edge { u, v, w });
    }
    Ok((edges, n))
}

/// Pairwise shortest-path distances as a min-plus matrix (zero diagonal,
/// `+inf` between disconnected vertices).
pub fn shortest_paths(edges: &[Edge], n: usize) -> Result<TropicalMatrix> {
    let mut w = TropicalMatrix::filled(n, n, f64::INFINITY, Semiring::MinPlus)?;
    for i in 0..n {
        w.set(i, i, 0.0)?;
    }
    for e in edges {
        if e.u >= n || e.v >= n {
            return Err(TropError::InvalidArgument(format!(
                "edge ({}, {}) outside {n} vertices",
                e.u, e.v
            )));
        }
        if !(e.w >= 0.0 && e.w.is_finite()) {
            return Err(TropError::InvalidArgument(format!(
                "edge ({}, {}) has invalid weight {}",
                e.u, e.v, e.w
            )));
        }
        if e.w < w.get(e.u, e.v) {
            w.set(e.u, e.v, e.w)?;
            w.set(e.v, e.u, e.w)?;
        }
    }
    w.minplus_closure()
}

/// Symmetric factor of a distance matrix plus each vertex's nearest latent
/// neighborhood.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkReduction {
    pub factorization: FactorizationResult,
    /// `argmin_k a_ik` per vertex, smallest index on ties.
    pub labels: Vec<usize>,
}

/// Fits `D ≈ A ⊠ Aᵀ` off the diagonal; rows of `A` are latent distances from
/// each vertex to `d` hubs.
pub fn network_reduce(
    dist: &TropicalMatrix,
    d: usize,
    config: &SymmetricConfig,
) -> Result<NetworkReduction> {
    let n = dist.rows();
    if !dist.is_square() {
        return Err(TropError::DimensionMismatch(
            "distance matrix must be square".into(),
        ));
    }
    for i in 0..n {
        if dist.get(i, i) != 0.0 {
            return Err(TropError::InvalidArgument(format!(
                "nonzero diagonal at vertex {i}"
            )));
        }
        for j in 0..n {
            if !dist.get(i, j).is_finite() {
                return Err(TropError::InvalidArgument(format!(
                    "vertices {i} and {j} are disconnected; restrict to one component"
                )));
            }
            if (dist.get(i, j) - dist.get(j, i)).abs() > 1e-9 {
                return Err(TropError::InvalidArgument(format!(
                    "asymmetric entry ({i}, {j})"
                )));
            }
        }
    }
    let factorization = symmetric_factorize(dist, d, false, config)?;
    let labels = (0..n)
        .map(|i| {
            let row = factorization.a.row(i);
            (0..row.len()).fold(0, |b, k| if row[k] < row[b] { k } else { b })
        })
        .collect();
    Ok(NetworkReduction {
        factorization,
        labels,
    })
}
