use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tropreg::applications::{
    frob_residual_sq, loglik, network_reduce, shortest_paths, simulate_orbit, sysid_fit, Edge,
    SysIdConfig,
};
use tropreg::factorization::{
    alternating_factorize, factor_residual, symmetric_factorize, symmetric_residual,
    AlternatingConfig, SymmetricConfig,
};
use tropreg::{Semiring, TropicalMatrix};

const NINF: f64 = f64::NEG_INFINITY;

fn system() -> TropicalMatrix {
    TropicalMatrix::from_rows(
        &[
            [7.0, 15.0, 10.0, NINF],
            [14.0, NINF, 11.0, 11.0],
            [14.0, NINF, NINF, NINF],
            [15.0, 8.0, 7.0, 9.0],
        ],
        Semiring::MaxPlus,
    )
    .unwrap()
}

#[test]
fn noise_free_orbit_follows_the_system() {
    let m = system();
    let x = simulate_orbit(&m, &[0.0; 4], 20, 0.0, 1).unwrap();
    for n in 0..20 {
        assert_eq!(m.matvec(x.state(n)).unwrap(), x.state(n + 1));
    }
    assert_eq!(frob_residual_sq(&m, &x).unwrap(), 0.0);
}

#[test]
fn row_residuals_sum_to_the_total() {
    let x = simulate_orbit(&system(), &[0.0; 4], 60, 1.0, 4).unwrap();
    let cfg = SysIdConfig {
        sigma: Some(1.0),
        ..SysIdConfig::default()
    };
    let r = sysid_fit(&x, 0.0, &cfg).unwrap();
    let sum: f64 = r.row_residual_sq.iter().sum();
    assert!((sum - r.frob_residual_sq).abs() <= 1e-9 * r.frob_residual_sq.max(1.0));
    assert_eq!(r.frob_residual_sq, frob_residual_sq(&r.a_hat, &x).unwrap());
    assert!(r.loglik.unwrap() >= loglik(&system(), &x, 1.0).unwrap());
    for row in &r.evidence {
        assert!(row.iter().sum::<usize>() >= 60);
    }
}

#[test]
fn penalty_never_improves_the_fit() {
    let x = simulate_orbit(&system(), &[0.0; 4], 100, 1.0, 2).unwrap();
    let cfg = SysIdConfig::default();
    let r: Vec<f64> = [0.0, 1.0, 10.0]
        .iter()
        .map(|&l| sysid_fit(&x, l, &cfg).unwrap().frob_residual_sq)
        .collect();
    assert!(r[0] <= r[1] && r[1] <= r[2], "{r:?}");
}

#[test]
fn alternating_sweeps_are_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let data: Vec<f64> = (0..6 * 5).map(|_| rng.random_range(0.0..10.0)).collect();
    let c = TropicalMatrix::new(6, 5, data, Semiring::MinPlus).unwrap();
    let cfg = AlternatingConfig {
        restarts: 3,
        ..AlternatingConfig::default()
    };
    let r = alternating_factorize(&c, 2, &cfg).unwrap();
    assert!(
        r.history.windows(2).all(|w| w[1] <= w[0] + 1e-9),
        "{:?}",
        r.history
    );
    let b = r.b.as_ref().unwrap();
    let recomputed = factor_residual(&c, &r.a, b).unwrap();
    assert!((recomputed - r.residual_sq).abs() <= 1e-9 * recomputed.max(1.0));
    assert!(r.normalized);
    for k in 0..2 {
        assert_eq!(
            r.a.column(k).iter().copied().fold(f64::INFINITY, f64::min),
            0.0
        );
    }
    assert!(r.a.get(5, 0) >= r.a.get(5, 1));
}

#[test]
fn full_rank_factorization_of_a_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a: Vec<f64> = (0..4 * 3).map(|_| rng.random_range(0.0..5.0)).collect();
    let b: Vec<f64> = (0..3 * 3).map(|_| rng.random_range(0.0..5.0)).collect();
    let a = TropicalMatrix::new(4, 3, a, Semiring::MinPlus).unwrap();
    let b = TropicalMatrix::new(3, 3, b, Semiring::MinPlus).unwrap();
    let c = a.tmul(&b).unwrap();
    let cfg = AlternatingConfig {
        restarts: 5,
        ..AlternatingConfig::default()
    };
    let r = alternating_factorize(&c, 3, &cfg).unwrap();
    assert!(r.residual_sq <= 1e-8, "{}", r.residual_sq);
}

fn ring_with_chords(n: usize, chords: usize, seed: u64) -> Vec<Edge> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<Edge> = (0..n)
        .map(|i| Edge {
            u: i,
            v: (i + 1) % n,
            w: 1.0,
        })
        .collect();
    for _ in 0..chords {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u != v {
            edges.push(Edge { u, v, w: 1.0 });
        }
    }
    edges
}

#[test]
fn network_reduction_of_a_62_vertex_graph() {
    let edges = ring_with_chords(62, 97, 17);
    let d = shortest_paths(&edges, 62).unwrap();
    let r = network_reduce(&d, 3, &SymmetricConfig::default()).unwrap();
    assert_eq!(r.factorization.a.shape(), (62, 3));
    assert_eq!(r.labels.len(), 62);
    assert!(r.labels.iter().all(|&l| l < 3));
    let recomputed = symmetric_residual(&d, &r.factorization.a, false);
    assert!((recomputed - r.factorization.residual_sq).abs() <= 1e-9 * recomputed.max(1.0));
}

#[test]
fn symmetric_fit_improves_on_its_start() {
    let edges = ring_with_chords(15, 10, 2);
    let d = shortest_paths(&edges, 15).unwrap();
    let r = symmetric_factorize(&d, 2, false, &SymmetricConfig::default()).unwrap();
    assert!(r.residual_sq <= r.history[0]);
    assert!(r.b.is_none());
}
