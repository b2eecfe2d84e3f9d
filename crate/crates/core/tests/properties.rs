use proptest::prelude::*;

use tropreg::applications::{build_design, poly_eval, shortest_paths, Edge, PolynomialSpec};
use tropreg::factorization::{assignment, assignment_residual, normalize, symmetric_residual};
use tropreg::oracles::{bellman_ford_closure, cycle_mean_by_enumeration};
use tropreg::pattern::{compute_pattern, compute_pattern_tol, interior_point, is_feasible};
use tropreg::regression::{newton_solve, residual, solve_inf, Norm};
use tropreg::{NewtonConfig, RegressionProblem, Semiring, TropicalMatrix};

const NINF: f64 = f64::NEG_INFINITY;

fn sparse_square(max_n: usize) -> impl Strategy<Value = TropicalMatrix> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(prop_oneof![3 => -5.0f64..5.0, 1 => Just(NINF)], n * n)
            .prop_map(move |v| TropicalMatrix::new(n, n, v, Semiring::MaxPlus).unwrap())
    })
}

fn dense(
    n: std::ops::Range<usize>,
    d: std::ops::Range<usize>,
) -> impl Strategy<Value = (TropicalMatrix, Vec<f64>)> {
    (n, d).prop_flat_map(|(n, d)| {
        (
            prop::collection::vec(-3.0f64..3.0, n * d),
            prop::collection::vec(-3.0f64..3.0, n),
        )
            .prop_map(move |(a, y)| (TropicalMatrix::new(n, d, a, Semiring::MaxPlus).unwrap(), y))
    })
}

fn int_problem(
    n: std::ops::Range<usize>,
    d: std::ops::Range<usize>,
) -> impl Strategy<Value = (TropicalMatrix, Vec<f64>)> {
    (n, d).prop_flat_map(|(n, d)| {
        (
            prop::collection::vec((-4i32..=4).prop_map(f64::from), n * d),
            prop::collection::vec((-4i32..=4).prop_map(f64::from), d),
        )
            .prop_map(move |(a, x)| (TropicalMatrix::new(n, d, a, Semiring::MaxPlus).unwrap(), x))
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn karp_matches_cycle_enumeration(m in sparse_square(6)) {
        let karp = m.max_cycle_mean().unwrap().lambda();
        let brute = cycle_mean_by_enumeration(&m).unwrap();
        if brute == NINF {
            prop_assert_eq!(karp, NINF);
        } else {
            prop_assert!((karp - brute).abs() <= 1e-9, "{} vs {}", karp, brute);
        }
    }

    #[test]
    fn minplus_closure_matches_bellman_ford(
        (n, w) in (1usize..30).prop_flat_map(|n| {
            (Just(n), prop::collection::vec(prop_oneof![1 => 0.0f64..10.0, 2 => Just(f64::INFINITY)], n * n))
        })
    ) {
        let m = TropicalMatrix::new(n, n, w, Semiring::MinPlus).unwrap();
        let fw = m.minplus_closure().unwrap();
        let bf = bellman_ford_closure(&m).unwrap();
        for (u, v) in fw.as_slice().iter().zip(bf.as_slice()) {
            prop_assert!(u == v || (u - v).abs() <= 1e-9, "{} vs {}", u, v);
        }
    }

    #[test]
    fn solve_inf_beats_random_candidates(
        (a, y) in dense(1..7, 1..5),
        cands in prop::collection::vec(prop::collection::vec(-6.0f64..6.0, 4), 40),
    ) {
        let p = RegressionProblem::new(a.clone(), y.clone()).unwrap();
        let s = solve_inf(&p).unwrap();
        for c in cands {
            let x = &c[..a.cols()];
            prop_assert!(s.residual <= residual(&a, x, &y, Norm::Inf).unwrap() + 1e-12);
        }
    }

    #[test]
    fn interior_point_reproduces_its_pattern((a, x) in int_problem(1..6, 1..5)) {
        let p = compute_pattern(&a, &x).unwrap();
        prop_assert!(is_feasible(&a, &p).unwrap());
        let ip = interior_point(&a, &p).unwrap();
        prop_assert_eq!(compute_pattern_tol(&a, &ip, 1e-9).unwrap(), p);
    }

    #[test]
    fn newton_never_worse_than_start(
        (a, y) in dense(1..8, 1..5),
        x0 in prop::collection::vec(-3.0f64..3.0, 4),
    ) {
        let p = RegressionProblem::new(a.clone(), y.clone()).unwrap();
        let x0 = &x0[..a.cols()];
        let s = newton_solve(&p, &NewtonConfig::default(), x0).unwrap();
        prop_assert!(s.residual <= p.residual(x0, Norm::Two).unwrap());
    }

    #[test]
    fn normalization_fixes_the_gauge(
        (n, d, m) in (1usize..5, 1usize..4, 1usize..5),
        seed in any::<u64>(),
    ) {
        use rand::{seq::SliceRandom, Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let a: Vec<f64> = (0..n * d).map(|_| rng.random_range(-5.0..5.0)).collect();
        let b: Vec<f64> = (0..d * m).map(|_| rng.random_range(-5.0..5.0)).collect();
        let a = TropicalMatrix::new(n, d, a, Semiring::MinPlus).unwrap();
        let b = TropicalMatrix::new(d, m, b, Semiring::MinPlus).unwrap();
        let mut perm: Vec<usize> = (0..d).collect();
        perm.shuffle(&mut rng);
        let shift: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
        let a2 = TropicalMatrix::new(n, d, (0..n * d).map(|q| {
            let (i, k) = (q / d, q % d);
            a.get(i, perm[k]) + shift[k]
        }).collect(), Semiring::MinPlus).unwrap();
        let b2 = TropicalMatrix::new(d, m, (0..d * m).map(|q| {
            let (k, j) = (q / m, q % m);
            b.get(perm[k], j) - shift[k]
        }).collect(), Semiring::MinPlus).unwrap();
        let (na, nb) = normalize(&a, &b).unwrap();
        let (na2, nb2) = normalize(&a2, &b2).unwrap();
        for (u, v) in na.as_slice().iter().zip(na2.as_slice()).chain(nb.as_slice().iter().zip(nb2.as_slice())) {
            prop_assert!((u - v).abs() <= 1e-12, "{} vs {}", u, v);
        }
        for k in 0..d {
            prop_assert_eq!(na.column(k).iter().copied().fold(f64::INFINITY, f64::min), 0.0);
        }
        for k in 1..d {
            prop_assert!(na.get(n - 1, k - 1) >= na.get(n - 1, k));
        }
        let c = a.tmul(&b).unwrap();
        let nc = na.tmul(&nb).unwrap();
        for (u, v) in c.as_slice().iter().zip(nc.as_slice()) {
            prop_assert!((u - v).abs() <= 1e-12);
        }
        prop_assert_eq!(normalize(&na, &nb).unwrap(), (na, nb));
    }

    #[test]
    fn assignment_residual_matches_direct(
        (n, d) in (1usize..7, 1usize..4),
        data in prop::collection::vec(0.0f64..10.0, 36 + 18),
        diag in any::<bool>(),
    ) {
        let c = TropicalMatrix::new(n, n, data[..n * n].to_vec(), Semiring::MinPlus).unwrap();
        let a = TropicalMatrix::new(n, d, data[36..36 + n * d].to_vec(), Semiring::MinPlus).unwrap();
        let k = assignment(&a);
        let via_k = assignment_residual(&c, &k, &a, diag);
        let direct = symmetric_residual(&c, &a, diag);
        prop_assert!((via_k - direct).abs() <= 1e-9 * (1.0 + direct));
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(k.get(i, j), k.get(j, i));
            }
        }
    }

    #[test]
    fn design_and_evaluation_agree(
        pts in prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 2), 1..15),
        slopes in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 2), 1..6),
        seed in -2.0f64..2.0,
    ) {
        let coeffs: Vec<f64> = (0..slopes.len()).map(|j| seed * j as f64 - 1.0).collect();
        let spec = PolynomialSpec::new(slopes.clone(), coeffs.clone()).unwrap();
        let x = build_design(&pts, &slopes).unwrap();
        let via = x.matvec(&coeffs).unwrap();
        for (p, v) in pts.iter().zip(via) {
            prop_assert_eq!(poly_eval(&spec, p), v);
        }
    }

    #[test]
    fn shortest_paths_are_a_metric(
        (n, raw) in (1usize..12).prop_flat_map(|n| {
            (Just(n), prop::collection::vec((0usize..12, 0usize..12, 0u8..8), 0..40))
        })
    ) {
        let edges: Vec<Edge> = raw
            .iter()
            .filter(|(u, v, _)| *u < n && *v < n)
            .map(|&(u, v, w)| Edge { u, v, w: f64::from(w) })
            .collect();
        let d = shortest_paths(&edges, n).unwrap();
        for i in 0..n {
            prop_assert_eq!(d.get(i, i), 0.0);
            for j in 0..n {
                prop_assert_eq!(d.get(i, j), d.get(j, i));
                for k in 0..n {
                    prop_assert!(d.get(i, j) <= d.get(i, k) + d.get(k, j));
                }
            }
        }
    }
}
