use lattice_median::acceptance::random_graph;
use lattice_median::coarse::coarse_median_point;
use lattice_median::corpus::{trees, Corpus};
use lattice_median::metric::{estimate_delta, is_median_graph, FiniteMetricSpace, Graph};
use lattice_median::rng::trial_rng;
use proptest::prelude::*;

fn gromov(d: &FiniteMetricSpace, x: usize, y: usize, w: usize) -> f64 {
    (d.d(x, w) + d.d(y, w) - d.d(x, y)) / 2.0
}

/// Smallest delta with `(x|y)_w >= min((x|z)_w, (y|z)_w) - delta` for all
/// quadruples, repeats included.
fn gromov_delta(d: &FiniteMetricSpace) -> f64 {
    let n = d.len();
    let mut delta: f64 = 0.0;
    for w in 0..n {
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let gap = gromov(d, x, z, w).min(gromov(d, y, z, w)) - gromov(d, x, y, w);
                    delta = delta.max(gap);
                }
            }
        }
    }
    delta
}

/// Points lying on geodesics between every pair of `a`, `b`, `c`.
fn triple_intersection(d: &FiniteMetricSpace, a: usize, b: usize, c: usize) -> Vec<usize> {
    let between = |x: usize, u: usize, v: usize| d.d(u, x) + d.d(x, v) == d.d(u, v);
    (0..d.len()).filter(|&x| between(x, a, b) && between(x, b, c) && between(x, a, c)).collect()
}

fn is_median_by_brute_force(g: &Graph) -> bool {
    let d = g.metric().unwrap();
    let n = d.len();
    (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| triple_intersection(&d, a, b, c).len() == 1)))
}

#[test]
fn four_point_delta_matches_gromov_products() {
    let mut rng = trial_rng(7, 0);
    let mut checked = 0;
    while checked < 40 {
        let g = random_graph(&mut rng, 12);
        if !g.is_connected() {
            continue;
        }
        let d = g.metric().unwrap();
        let est = estimate_delta(&d);
        assert!(est.exhaustive);
        assert_eq!(est.delta, gromov_delta(&d), "{:?}", g.edges());
        checked += 1;
    }
}

#[test]
fn corpus_graphs_have_expected_delta() {
    for (name, g) in Corpus::builtin().graphs {
        let d = g.metric().unwrap();
        assert_eq!(estimate_delta(&d).delta, gromov_delta(&d), "{name}");
    }
}

#[test]
fn trees_are_zero_hyperbolic() {
    for t in trees(9) {
        assert_eq!(estimate_delta(&t.metric().unwrap()).delta, 0.0);
    }
}

#[test]
fn named_graphs_median_status() {
    let cases = [
        ("Q3", Graph::hypercube(3), true),
        ("grid 3x4", Graph::grid(3, 4), true),
        ("C4", Graph::cycle(4).unwrap(), true),
        ("C6", Graph::cycle(6).unwrap(), false),
        ("K3", Graph::complete(3), false),
        ("K2,3", Graph::complete_bipartite(2, 3), false),
        ("path", Graph::path(6), true),
    ];
    for (name, g, expected) in cases {
        assert_eq!(is_median_graph(&g).unwrap().is_median(), expected, "{name}");
        assert_eq!(is_median_by_brute_force(&g), expected, "{name}");
    }
}

#[test]
fn median_recognition_matches_brute_force() {
    let mut rng = trial_rng(11, 0);
    let mut checked = 0;
    while checked < 200 {
        let g = random_graph(&mut rng, 9);
        if !g.is_connected() {
            continue;
        }
        assert_eq!(is_median_graph(&g).unwrap().is_median(), is_median_by_brute_force(&g), "{:?}", g.edges());
        checked += 1;
    }
}

#[test]
fn median_graph_algebra_is_triple_intersection() {
    let g = Graph::grid(3, 3).box_product(&Graph::path(2));
    let d = g.metric().unwrap();
    let check = is_median_graph(&g).unwrap();
    let alg = check.algebra().unwrap();
    let n = d.len();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                assert_eq!(vec![alg.median(a, b, c)], triple_intersection(&d, a, b, c));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coarse_median_on_trees_is_the_tree_median(
        parents in prop::collection::vec(0usize..64, 1..15),
        a in 0usize..16, b in 0usize..16, c in 0usize..16,
    ) {
        let edges: Vec<(usize, usize)> = parents.iter().enumerate().map(|(i, &p)| (p % (i + 1), i + 1)).collect();
        let g = Graph::new(parents.len() + 1, &edges).unwrap();
        let d = g.metric().unwrap();
        let n = d.len();
        let (a, b, c) = (a % n, b % n, c % n);
        let m = coarse_median_point(&d, a, b, c).unwrap();
        prop_assert_eq!(vec![m], triple_intersection(&d, a, b, c));
    }
}
