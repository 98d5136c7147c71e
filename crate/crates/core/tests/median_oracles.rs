use std::collections::BTreeSet;

use lattice_median::corpus::trees;
use lattice_median::median::{
    check_homomorphism, find_wall, free_median_algebra, verify_median_axioms, FiniteMedianAlgebra,
};
use lattice_median::metric::is_median_graph;
use proptest::prelude::*;

/// Fixpoint of coordinatewise majority over the `n` projections of
/// `{0,1}^(2^n)`, swept until nothing new appears.
fn closure_by_sweeps(n: usize) -> usize {
    let width = 1usize << n;
    let mut set: BTreeSet<u32> = (0..n)
        .map(|i| (0..width).filter(|s| s & (1 << i) != 0).fold(0u32, |v, s| v | 1 << s))
        .collect();
    loop {
        let items: Vec<u32> = set.iter().copied().collect();
        let before = set.len();
        for &a in &items {
            for &b in &items {
                for &c in &items {
                    set.insert((a & b) | (b & c) | (c & a));
                }
            }
        }
        if set.len() == before {
            return set.len();
        }
    }
}

#[test]
fn free_sizes_match_sweep_closure() {
    for n in 1..=4 {
        let free = free_median_algebra(n, 1 << 16).unwrap();
        assert_eq!(free.algebra.len(), closure_by_sweeps(n), "n = {n}");
    }
}

/// Monotone self-dual Boolean functions of `n` variables, by brute force
/// over all truth tables.
fn self_dual_monotone(n: usize) -> usize {
    let width = 1usize << n;
    let full = width - 1;
    (0u64..1 << width)
        .filter(|&t| {
            let f = |s: usize| t >> s & 1 == 1;
            let monotone = (0..width).all(|s| (0..n).all(|i| !f(s) || f(s | 1 << i)));
            let self_dual = (0..width).all(|s| f(s) != f(full ^ s));
            monotone && self_dual
        })
        .count()
}

#[test]
fn free_sizes_count_self_dual_monotone_functions() {
    for n in 1..=4 {
        let free = free_median_algebra(n, 1 << 16).unwrap();
        assert_eq!(free.algebra.len(), self_dual_monotone(n), "n = {n}");
    }
}

#[test]
fn free_algebra_budget() {
    assert!(matches!(
        free_median_algebra(4, 10),
        Err(lattice_median::Error::BudgetExceeded { .. })
    ));
}

/// Extends `images` of the generators along medians until every element
/// has an image.
fn extend(free: &FiniteMedianAlgebra, gens: &[usize], images: &[usize], dst: &FiniteMedianAlgebra) -> Vec<usize> {
    let n = free.len();
    let mut f: Vec<Option<usize>> = vec![None; n];
    for (&g, &y) in gens.iter().zip(images) {
        f[g] = Some(y);
    }
    while f.iter().any(Option::is_none) {
        let known: Vec<usize> = (0..n).filter(|&x| f[x].is_some()).collect();
        for &a in &known {
            for &b in &known {
                for &c in &known {
                    let m = free.median(a, b, c);
                    if f[m].is_none() {
                        f[m] = Some(dst.median(f[a].unwrap(), f[b].unwrap(), f[c].unwrap()));
                    }
                }
            }
        }
    }
    f.into_iter().map(Option::unwrap).collect()
}

#[test]
fn free_algebras_map_onto_their_images() {
    let cube = FiniteMedianAlgebra::boolean_power(3).unwrap();
    for n in 1..=3 {
        let free = free_median_algebra(n, 1 << 16).unwrap();
        // Every assignment of generators into the cube extends.
        for code in 0..8usize.pow(n as u32) {
            let images: Vec<usize> = (0..n).map(|i| code / 8usize.pow(i as u32) % 8).collect();
            let f = extend(&free.algebra, &free.generators, &images, &cube);
            assert_eq!(check_homomorphism(&f, &free.algebra, &cube).unwrap(), None);
            let image: BTreeSet<usize> = f.iter().copied().collect();
            let closure: BTreeSet<usize> = cube.subalgebra_closure(&images).unwrap().into_iter().collect();
            assert_eq!(image, closure);
        }
    }
}

#[test]
fn tree_algebras_satisfy_axioms() {
    for n in 1..=8 {
        for t in trees(n) {
            let check = is_median_graph(&t).unwrap();
            let alg = check.algebra().expect("trees are median graphs");
            assert!(verify_median_axioms(alg).passed());
        }
    }
}

#[test]
fn tree_counts() {
    // Unlabeled trees on n vertices.
    let counts: Vec<usize> = (1..=10).map(|n| trees(n).len()).collect();
    assert_eq!(counts, [1, 1, 1, 2, 3, 6, 11, 23, 47, 106]);
}

fn random_tree(parents: &[usize]) -> lattice_median::metric::Graph {
    let edges: Vec<(usize, usize)> = parents.iter().enumerate().map(|(i, &p)| (p % (i + 1), i + 1)).collect();
    lattice_median::metric::Graph::new(parents.len() + 1, &edges).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn walls_separate_points_of_random_trees(parents in prop::collection::vec(0usize..64, 1..20)) {
        let g = random_tree(&parents);
        let alg = is_median_graph(&g).unwrap().algebra().cloned().unwrap();
        for x in 0..alg.len() {
            for y in 0..alg.len() {
                if x != y {
                    let h = find_wall(&alg, x, y).unwrap();
                    prop_assert!(h.is_valid_wall(&alg).unwrap());
                    prop_assert!(h.separates(x, y));
                }
            }
        }
    }

    #[test]
    fn intervals_are_convex(parents in prop::collection::vec(0usize..64, 1..16), a in 0usize..16, b in 0usize..16) {
        let g = random_tree(&parents);
        let alg = is_median_graph(&g).unwrap().algebra().cloned().unwrap();
        let (a, b) = (a % alg.len(), b % alg.len());
        let interval = alg.algebraic_interval(a, b).unwrap();
        prop_assert!(alg.is_convex(&interval).unwrap().is_none());
        prop_assert!(interval.contains(&a) && interval.contains(&b));
    }

    #[test]
    fn cube_products_stay_median(n in 1usize..3, m in 1usize..3) {
        let p = FiniteMedianAlgebra::boolean_power(n).unwrap().product(&FiniteMedianAlgebra::boolean_power(m).unwrap()).unwrap();
        prop_assert_eq!(p.len(), 1 << (n + m));
        prop_assert!(verify_median_axioms(&p).passed());
    }
}
