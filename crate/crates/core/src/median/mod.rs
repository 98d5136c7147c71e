//! Finite median algebras.
//!
//! A median algebra is stored as a dense ternary table over element indices
//! `0..n`. Elements carry string labels for file I/O and reports; every search
//! iterates in index order so results are deterministic.

mod free;
mod io;
mod rank;
mod wall;

pub use free::{free_median_algebra, FreeMedianAlgebra};
pub use io::AlgebraFile;
pub use rank::{rank, RankResult};
pub use wall::{find_wall, Halfspace};

use fixedbitset::FixedBitSet;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMedianAlgebra {
    labels: Vec<String>,
    table: Vec<u32>,
    verified: bool,
}

impl FiniteMedianAlgebra {
    /// Builds an algebra by evaluating `mu` on every ordered triple.
    pub fn from_fn(
        labels: Vec<String>,
        mu: impl Fn(usize, usize, usize) -> usize,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(invalid("a median algebra needs at least one element"));
        }
        let mut table = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let m = mu(a, b, c);
                    if m >= n {
                        return Err(invalid(format!("mu({a},{b},{c}) = {m} is out of range")));
                    }
                    table.push(m as u32);
                }
            }
        }
        Ok(Self {
            labels,
            table,
            verified: false,
        })
    }

    /// Builds an algebra from a dense row-major table of length `n^3`.
    pub fn from_table(labels: Vec<String>, table: Vec<usize>) -> Result<Self> {
        let n = labels.len();
        if table.len() != n * n * n {
            return Err(invalid(format!(
                "median table has {} entries, expected {}",
                table.len(),
                n * n * n
            )));
        }
        Self::from_fn(labels, |a, b, c| table[(a * n + b) * n + c])
    }

    /// The Boolean cube `{0,1}^n` with coordinatewise majority. Element `i`
    /// is labelled by its `n`-bit binary expansion, most significant bit first.
    pub fn boolean_power(n: usize) -> Result<Self> {
        if n > 12 {
            return Err(Error::BudgetExceeded {
                what: "boolean power dimension",
                limit: 12,
                partial: n,
            });
        }
        let labels = (0..1usize << n)
            .map(|i| if n == 0 { "()".to_string() } else { format!("{i:0n$b}") })
            .collect();
        Self::from_fn(labels, |a, b, c| (a & b) | (b & c) | (a & c))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    #[inline]
    pub fn median(&self, a: usize, b: usize, c: usize) -> usize {
        let n = self.len();
        self.table[(a * n + b) * n + c] as usize
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    /// Runs the exhaustive axiom check and marks the algebra verified on success.
    pub fn into_verified(mut self) -> std::result::Result<Self, AxiomReport> {
        let report = verify_median_axioms(&self);
        if report.passed() {
            self.verified = true;
            Ok(self)
        } else {
            Err(report)
        }
    }

    pub(crate) fn check_element(&self, a: usize) -> Result<()> {
        if a < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownElement(a))
        }
    }

    /// The median subalgebra generated by `gens`, as sorted indices.
    pub fn subalgebra_closure(&self, gens: &[usize]) -> Result<Vec<usize>> {
        for &g in gens {
            self.check_element(g)?;
        }
        let mut inside = FixedBitSet::with_capacity(self.len());
        let mut members: Vec<usize> = Vec::new();
        for &g in gens {
            if !inside.put(g) {
                members.push(g);
            }
        }
        let mut frontier = 0;
        while frontier < members.len() {
            let new = members[frontier];
            frontier += 1;
            let snapshot = members.len();
            for i in 0..snapshot {
                for j in 0..snapshot {
                    let m = self.median(new, members[i], members[j]);
                    if !inside.put(m) {
                        members.push(m);
                    }
                }
            }
        }
        members.sort_unstable();
        Ok(members)
    }

    /// Restriction to a subset closed under the median, relabelled in the
    /// order of `subset`.
    pub fn restrict(&self, subset: &[usize]) -> Result<Self> {
        let mut position = vec![usize::MAX; self.len()];
        for (i, &s) in subset.iter().enumerate() {
            self.check_element(s)?;
            position[s] = i;
        }
        let labels = subset.iter().map(|&s| self.labels[s].clone()).collect();
        let mut table = Vec::with_capacity(subset.len().pow(3));
        for &a in subset {
            for &b in subset {
                for &c in subset {
                    let p = position[self.median(a, b, c)];
                    if p == usize::MAX {
                        return Err(invalid("subset is not closed under the median"));
                    }
                    table.push(p);
                }
            }
        }
        Self::from_table(labels, table)
    }

    /// Product algebra with the coordinatewise median; element `(i, j)` has
    /// index `i * other.len() + j`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        let m = other.len();
        let labels = self
            .labels
            .iter()
            .flat_map(|a| other.labels.iter().map(move |b| format!("({a},{b})")))
            .collect();
        Self::from_fn(labels, |x, y, z| {
            self.median(x / m, y / m, z / m) * m + other.median(x % m, y % m, z % m)
        })
    }

    /// Bitset of `{c : mu(a, b, c) = c}`.
    pub(crate) fn interval_set(&self, a: usize, b: usize) -> FixedBitSet {
        let mut set = FixedBitSet::with_capacity(self.len());
        for c in 0..self.len() {
            if self.median(a, b, c) == c {
                set.insert(c);
            }
        }
        set
    }

    /// The algebraic interval `[a, b] = {c : mu(a, b, c) = c}`.
    pub fn algebraic_interval(&self, a: usize, b: usize) -> Result<Vec<usize>> {
        self.check_element(a)?;
        self.check_element(b)?;
        Ok(self.interval_set(a, b).ones().collect())
    }

    /// Checks convexity of `set`. Returns the first pair whose interval leaves
    /// the set, or `None` when the set is convex.
    pub fn is_convex(&self, set: &[usize]) -> Result<Option<ConvexityViolation>> {
        let mut inside = FixedBitSet::with_capacity(self.len());
        for &s in set {
            self.check_element(s)?;
            inside.insert(s);
        }
        let members: Vec<usize> = inside.ones().collect();
        for &a in &members {
            for &b in &members {
                let interval = self.interval_set(a, b);
                if let Some(outside) = interval.difference(&inside).next() {
                    return Ok(Some(ConvexityViolation {
                        a,
                        b,
                        outside,
                        interval_size: interval.count_ones(..),
                    }));
                }
            }
        }
        Ok(None)
    }

    /// Smallest convex set containing `seed`.
    pub(crate) fn convex_hull(&self, seed: &FixedBitSet, intervals: &IntervalTable) -> FixedBitSet {
        let mut hull = seed.clone();
        let mut members: Vec<usize> = hull.ones().collect();
        let mut frontier = 0;
        while frontier < members.len() {
            let p = members[frontier];
            frontier += 1;
            let snapshot = members.len();
            for i in 0..snapshot {
                let q = members[i];
                for c in intervals.get(p, q).ones() {
                    if !hull.put(c) {
                        members.push(c);
                    }
                }
            }
        }
        hull
    }
}

/// All algebraic intervals, precomputed.
pub(crate) struct IntervalTable {
    n: usize,
    sets: Vec<FixedBitSet>,
}

impl IntervalTable {
    pub(crate) fn new(alg: &FiniteMedianAlgebra) -> Self {
        let n = alg.len();
        let sets = (0..n * n).map(|ab| alg.interval_set(ab / n, ab % n)).collect();
        Self { n, sets }
    }

    pub(crate) fn get(&self, a: usize, b: usize) -> &FixedBitSet {
        &self.sets[a * self.n + b]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConvexityViolation {
    pub a: usize,
    pub b: usize,
    /// A point of `[a, b]` outside the set.
    pub outside: usize,
    pub interval_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axiom {
    /// Symmetry under permutation of the arguments.
    M1,
    /// `mu(a, a, b) = a`.
    M2,
    /// `mu(a, b, mu(c, d, e)) = mu(mu(a, b, c), mu(a, b, d), e)`.
    M3,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    pub tuple: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub m1: Option<AxiomViolation>,
    pub m2: Option<AxiomViolation>,
    pub m3: Option<AxiomViolation>,
    pub quintuples_checked: u64,
    pub exhaustive: bool,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.m1.is_none() && self.m2.is_none() && self.m3.is_none()
    }

    pub fn first_violation(&self) -> Option<&AxiomViolation> {
        self.m1.as_ref().or(self.m2.as_ref()).or(self.m3.as_ref())
    }
}

fn check_m1(alg: &FiniteMedianAlgebra) -> Option<AxiomViolation> {
    let n = alg.len();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let m = alg.median(a, b, c);
                if alg.median(b, a, c) != m || alg.median(b, c, a) != m {
                    return Some(AxiomViolation {
                        axiom: Axiom::M1,
                        tuple: vec![a, b, c],
                    });
                }
            }
        }
    }
    None
}

fn check_m2(alg: &FiniteMedianAlgebra) -> Option<AxiomViolation> {
    let n = alg.len();
    for a in 0..n {
        for b in 0..n {
            if alg.median(a, a, b) != a {
                return Some(AxiomViolation {
                    axiom: Axiom::M2,
                    tuple: vec![a, b],
                });
            }
        }
    }
    None
}

#[inline]
fn m3_holds(alg: &FiniteMedianAlgebra, a: usize, b: usize, c: usize, d: usize, e: usize) -> bool {
    let lhs = alg.median(a, b, alg.median(c, d, e));
    let rhs = alg.median(alg.median(a, b, c), alg.median(a, b, d), e);
    lhs == rhs
}

/// Exhaustive check of (M1) on all triples, (M2) on all pairs and (M3) on all
/// quintuples. Reports the lexicographically first violation per axiom.
pub fn verify_median_axioms(alg: &FiniteMedianAlgebra) -> AxiomReport {
    let n = alg.len();
    let m3 = (0..n)
        .into_par_iter()
        .map(|a| {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        for e in 0..n {
                            if !m3_holds(alg, a, b, c, d, e) {
                                return Some(vec![a, b, c, d, e]);
                            }
                        }
                    }
                }
            }
            None
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .next()
        .map(|tuple| AxiomViolation {
            axiom: Axiom::M3,
            tuple,
        });
    AxiomReport {
        m1: check_m1(alg),
        m2: check_m2(alg),
        m3,
        quintuples_checked: (n as u64).pow(5),
        exhaustive: true,
    }
}

/// (M1) and (M2) exhaustively, (M3) on `samples` uniformly drawn quintuples.
pub fn verify_median_axioms_sampled(
    alg: &FiniteMedianAlgebra,
    samples: u64,
    seed: u64,
) -> AxiomReport {
    let n = alg.len();
    let mut rng = crate::rng::trial_rng(seed, 0);
    let mut m3 = None;
    for _ in 0..samples {
        let t: [usize; 5] = std::array::from_fn(|_| rng.gen_range(0..n));
        if !m3_holds(alg, t[0], t[1], t[2], t[3], t[4]) {
            m3 = Some(AxiomViolation {
                axiom: Axiom::M3,
                tuple: t.to_vec(),
            });
            break;
        }
    }
    AxiomReport {
        m1: check_m1(alg),
        m2: check_m2(alg),
        m3,
        quintuples_checked: samples,
        exhaustive: false,
    }
}

/// Checks that `f` (given as the image of each source index) commutes with
/// the medians. Returns the first triple where it does not.
pub fn check_homomorphism(
    f: &[usize],
    src: &FiniteMedianAlgebra,
    dst: &FiniteMedianAlgebra,
) -> Result<Option<(usize, usize, usize)>> {
    if f.len() != src.len() {
        return Err(invalid(format!(
            "map is defined on {} elements, source has {}",
            f.len(),
            src.len()
        )));
    }
    for &y in f {
        dst.check_element(y)?;
    }
    let n = src.len();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if f[src.median(a, b, c)] != dst.median(f[a], f[b], f[c]) {
                    return Ok(Some((a, b, c)));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    /// Median of a path `0 - 1 - ... - (n-1)`: the middle value.
    fn path(n: usize) -> FiniteMedianAlgebra {
        FiniteMedianAlgebra::from_fn(labels(n), |a, b, c| {
            let mut v = [a, b, c];
            v.sort_unstable();
            v[1]
        })
        .unwrap()
    }

    #[test]
    fn majority_square_passes() {
        let sq = FiniteMedianAlgebra::boolean_power(2).unwrap();
        assert!(verify_median_axioms(&sq).passed());
    }

    #[test]
    fn first_argument_projection_fails_m1() {
        let alg = FiniteMedianAlgebra::from_fn(labels(2), |a, _, _| a).unwrap();
        let report = verify_median_axioms(&alg);
        let v = report.m1.clone().unwrap();
        assert_eq!(v.tuple, vec![0, 1, 0]);
        assert_eq!(alg.median(0, 1, 0), 0);
        assert_eq!(alg.median(1, 0, 0), 1);
        assert_eq!(report.first_violation().unwrap().axiom, Axiom::M1);
    }

    #[test]
    fn non_total_table_is_rejected() {
        assert!(FiniteMedianAlgebra::from_table(labels(2), vec![0; 7]).is_err());
        assert!(FiniteMedianAlgebra::from_fn(labels(2), |_, _, _| 5).is_err());
    }

    #[test]
    fn interval_of_cube_antipodes_is_everything() {
        let cube = FiniteMedianAlgebra::boolean_power(3).unwrap();
        let a = cube.index_of("000").unwrap();
        let b = cube.index_of("111").unwrap();
        assert_eq!(cube.algebraic_interval(a, b).unwrap().len(), 8);
    }

    #[test]
    fn degenerate_interval_is_singleton() {
        let cube = FiniteMedianAlgebra::boolean_power(3).unwrap();
        for a in 0..8 {
            assert_eq!(cube.algebraic_interval(a, a).unwrap(), vec![a]);
        }
    }

    #[test]
    fn path_interval_contains_middle() {
        let p = path(3);
        assert_eq!(p.algebraic_interval(0, 2).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn unknown_element_is_an_error() {
        let p = path(3);
        assert!(matches!(p.algebraic_interval(0, 3), Err(Error::UnknownElement(3))));
        assert!(p.is_convex(&[7]).is_err());
    }

    #[test]
    fn convexity_examples() {
        let cube = FiniteMedianAlgebra::boolean_power(3).unwrap();
        for a in 0..8 {
            assert!(cube.is_convex(&[a]).unwrap().is_none());
        }
        let v = cube.is_convex(&[0, 7]).unwrap().unwrap();
        assert_eq!(v.interval_size, 8);
        assert_eq!((v.a, v.b), (0, 7));
    }

    #[test]
    fn intervals_are_convex_in_cube_and_path() {
        for alg in [FiniteMedianAlgebra::boolean_power(3).unwrap(), path(6)] {
            for a in 0..alg.len() {
                for b in 0..alg.len() {
                    let iv = alg.algebraic_interval(a, b).unwrap();
                    assert!(iv.contains(&a) && iv.contains(&b));
                    assert!(alg.is_convex(&iv).unwrap().is_none());
                }
            }
        }
    }

    #[test]
    fn projection_of_square_is_a_homomorphism() {
        let sq = FiniteMedianAlgebra::boolean_power(2).unwrap();
        let bit = FiniteMedianAlgebra::boolean_power(1).unwrap();
        let identity: Vec<usize> = (0..4).collect();
        assert_eq!(check_homomorphism(&identity, &sq, &sq).unwrap(), None);
        let drop_low: Vec<usize> = (0..4).map(|i| i >> 1).collect();
        assert_eq!(check_homomorphism(&drop_low, &sq, &bit).unwrap(), None);
        // Not a homomorphism: collapses only one point.
        let bad = vec![0, 0, 0, 1];
        assert!(check_homomorphism(&bad, &sq, &bit).unwrap().is_some());
        assert!(check_homomorphism(&[0, 1], &sq, &bit).is_err());
    }

    #[test]
    fn subalgebra_closure_of_three_cube_points() {
        let cube = FiniteMedianAlgebra::boolean_power(3).unwrap();
        // 100, 010, 001 generate their median 000.
        let gens = [4, 2, 1];
        assert_eq!(cube.subalgebra_closure(&gens).unwrap(), vec![0, 1, 2, 4]);
        let sub = cube.restrict(&[0, 1, 2, 4]).unwrap();
        assert!(verify_median_axioms(&sub).passed());
        assert!(cube.restrict(&[1, 2, 4]).is_err());
    }

    #[test]
    fn sampled_check_agrees_on_valid_algebra() {
        let cube = FiniteMedianAlgebra::boolean_power(3).unwrap();
        let r = verify_median_axioms_sampled(&cube, 10_000, 3);
        assert!(r.passed());
        assert!(!r.exhaustive);
    }

    #[test]
    fn product_of_paths_is_median() {
        let prod = path(3).product(&path(2)).unwrap();
        assert_eq!(prod.len(), 6);
        assert!(verify_median_axioms(&prod).passed());
        assert!(prod.clone().into_verified().unwrap().is_verified());
    }
}
