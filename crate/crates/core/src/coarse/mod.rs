//! Coarse medians on graphs.
//!
//! The median of `(a, b, c)` is the vertex minimizing `d(x,a) + d(x,b) + d(x,c)`,
//! smallest index first on ties. On median graphs this is the exact median;
//! on hyperbolic graphs it is one of the coarsely equivalent choices.

mod approx;

pub use approx::{approximation_tree, distortion_bound, ApproxTree, ApproximationData};

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::metric::{estimate_delta, FiniteMetricSpace, Graph};
use crate::EPS;

/// Min-sum centroid of three points, smallest index on ties.
pub fn coarse_median_point(space: &FiniteMetricSpace, a: usize, b: usize, c: usize) -> Result<usize> {
    space.check_point(a)?;
    space.check_point(b)?;
    space.check_point(c)?;
    Ok(centroid(space, a, b, c))
}

fn centroid(space: &FiniteMetricSpace, a: usize, b: usize, c: usize) -> usize {
    if a == b || a == c {
        return a;
    }
    if b == c {
        return b;
    }
    let mut best = (f64::INFINITY, 0);
    for x in 0..space.len() {
        let s = space.d(x, a) + space.d(x, b) + space.d(x, c);
        if s < best.0 - EPS {
            best = (s, x);
        }
    }
    best.1
}

#[derive(Debug, Clone)]
pub struct CoarseMedianStructure {
    pub id: String,
    graph: Graph,
    space: FiniteMetricSpace,
    mu: Vec<u32>,
    pub delta: f64,
    /// Lipschitz constant, filled in by [`verify_c1`].
    pub k: Option<f64>,
    pub h0: f64,
    /// Measured `h(p)`, kept as a running maximum over all subsets of size `<= p`.
    pub h_table: BTreeMap<usize, f64>,
}

impl CoarseMedianStructure {
    /// Tabulates the min-sum median of a connected graph; `h0` starts at the
    /// graph's four-point delta.
    pub fn new(id: impl Into<String>, graph: Graph) -> Result<Self> {
        let space = graph.metric()?;
        let n = space.len();
        let rows: Vec<Vec<u32>> = (0..n)
            .into_par_iter()
            .map(|a| {
                let mut row = Vec::with_capacity(n * n);
                for b in 0..n {
                    for c in 0..n {
                        row.push(if a <= b && b <= c {
                            centroid(&space, a, b, c) as u32
                        } else {
                            u32::MAX
                        });
                    }
                }
                row
            })
            .collect();
        let mut mu: Vec<u32> = rows.into_iter().flatten().collect();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut s = [a, b, c];
                    s.sort_unstable();
                    mu[(a * n + b) * n + c] = mu[(s[0] * n + s[1]) * n + s[2]];
                }
            }
        }
        let delta = estimate_delta(&space).delta;
        Ok(Self {
            id: id.into(),
            graph,
            space,
            mu,
            delta,
            k: None,
            h0: delta,
            h_table: BTreeMap::new(),
        })
    }

    pub fn with_h0(mut self, h0: f64) -> Self {
        self.h0 = h0;
        self
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn space(&self) -> &FiniteMetricSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    #[inline]
    pub fn median(&self, a: usize, b: usize, c: usize) -> usize {
        let n = self.len();
        self.mu[(a * n + b) * n + c] as usize
    }

    /// Folds a measured `h` for a subset of size `p` into the table, keeping
    /// `h_table` non-decreasing in `p`.
    pub fn record_h(&mut self, p: usize, h: f64) {
        let floor = self
            .h_table
            .range(..p)
            .map(|(_, &v)| v)
            .fold(0.0, f64::max);
        let entry = self.h_table.entry(p).or_insert(floor);
        *entry = entry.max(h).max(floor);
        for (_, v) in self.h_table.range_mut(p + 1..) {
            *v = v.max(h);
        }
    }

    pub fn report(&self, witnesses: Vec<Witness>) -> CoarseReport {
        CoarseReport {
            space: self.id.clone(),
            delta: self.delta,
            k: self.k,
            h0: self.h0,
            h_table: self.h_table.clone(),
            witnesses,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum C1Mode {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct C1Report {
    /// Smallest `k` for which the Lipschitz inequality holds with the given `h0`.
    pub k: f64,
    pub h0: f64,
    /// Largest `d(mu(a,b,c), mu(a',b',c')) - h0` seen.
    pub max_excess: f64,
    /// Sextuple `(a, b, c, a', b', c')` attaining `k`.
    pub witness: Option<[usize; 6]>,
    pub sextuples: u64,
    pub exhaustive: bool,
}

#[derive(Debug, Clone, Copy)]
struct C1Acc {
    k: f64,
    excess: f64,
    witness: Option<[usize; 6]>,
}

impl C1Acc {
    fn new() -> Self {
        Self {
            k: 0.0,
            excess: f64::NEG_INFINITY,
            witness: None,
        }
    }

    #[inline]
    fn push(&mut self, cms: &CoarseMedianStructure, s: [usize; 6]) {
        let d = &cms.space;
        let moved = d.d(cms.median(s[0], s[1], s[2]), cms.median(s[3], s[4], s[5]));
        let excess = moved - cms.h0;
        if excess > self.excess {
            self.excess = excess;
        }
        if excess > EPS {
            let spread = d.d(s[0], s[3]) + d.d(s[1], s[4]) + d.d(s[2], s[5]);
            let ratio = excess / spread;
            if ratio > self.k + EPS {
                self.k = ratio;
                self.witness = Some(s);
            }
        }
    }

    fn merge(self, other: Self) -> Self {
        Self {
            k: if other.k > self.k + EPS { other.k } else { self.k },
            witness: if other.k > self.k + EPS { other.witness } else { self.witness },
            excess: self.excess.max(other.excess),
        }
    }
}

/// Measures the Lipschitz condition
/// `d(mu(a,b,c), mu(a',b',c')) <= k (d(a,a') + d(b,b') + d(c,c')) + h0`
/// and stores the smallest admissible `k` in the structure.
///
/// When `moved > h0` the sextuples differ, so the spread is positive.
pub fn verify_c1(cms: &mut CoarseMedianStructure, mode: C1Mode) -> C1Report {
    let n = cms.len();
    let shared: &CoarseMedianStructure = cms;
    let (acc, sextuples, exhaustive) = match mode {
        C1Mode::Exhaustive => {
            let acc = (0..n * n * n)
                .into_par_iter()
                .map(|abc| {
                    let (a, b, c) = (abc / (n * n), (abc / n) % n, abc % n);
                    let mut acc = C1Acc::new();
                    for a2 in 0..n {
                        for b2 in 0..n {
                            for c2 in 0..n {
                                acc.push(shared, [a, b, c, a2, b2, c2]);
                            }
                        }
                    }
                    acc
                })
                .collect::<Vec<_>>()
                .into_iter()
                .fold(C1Acc::new(), C1Acc::merge);
            (acc, (n as u64).pow(6), true)
        }
        C1Mode::Sampled { samples, seed } => {
            let mut rng = crate::rng::trial_rng(seed, 0);
            let mut acc = C1Acc::new();
            for _ in 0..samples {
                let s: [usize; 6] = std::array::from_fn(|_| rng.gen_range(0..n));
                acc.push(shared, s);
            }
            (acc, samples, false)
        }
    };
    cms.k = Some(acc.k);
    C1Report {
        k: acc.k,
        h0: cms.h0,
        max_excess: acc.excess.max(0.0),
        witness: acc.witness,
        sextuples,
        exhaustive,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct C2Report {
    pub p: usize,
    /// Max of the two approximation defects below.
    pub h: f64,
    /// Max over tree triples of `d(eta(mu_tree(x,y,z)), mu(eta x, eta y, eta z))`.
    pub median_defect: f64,
    /// Max over `a` in the subset of `d(a, eta(pi(a)))`.
    pub leaf_defect: f64,
    pub distortion: f64,
    pub distortion_bound: f64,
    pub within_bound: bool,
    /// Tree nodes `(x, y, z)` attaining `median_defect`.
    pub witness: Option<[usize; 3]>,
}

/// Builds the tree approximation of `subset` and evaluates both finite
/// approximation inequalities. Pure; use [`verify_c2`] to also record `h`.
pub fn measure_c2(cms: &CoarseMedianStructure, subset: &[usize]) -> Result<C2Report> {
    let basepoint = *subset
        .iter()
        .min()
        .ok_or_else(|| invalid("approximation needs a nonempty subset"))?;
    let data = approximation_tree(&cms.graph, &cms.space, subset, basepoint)?;
    let d = &cms.space;
    let nodes = data.tree.len();
    let mut median_defect = 0.0;
    let mut witness = None;
    for x in 0..nodes {
        for y in x..nodes {
            for z in y..nodes {
                let m = data.tree.median(x, y, z);
                let e = d.d(
                    data.eta[m],
                    cms.median(data.eta[x], data.eta[y], data.eta[z]),
                );
                if e > median_defect {
                    median_defect = e;
                    witness = Some([x, y, z]);
                }
            }
        }
    }
    let leaf_defect = data
        .pi
        .iter()
        .map(|&(a, node)| d.d(a, data.eta[node]))
        .fold(0.0, f64::max);
    let p = data.pi.len();
    let bound = distortion_bound(cms.delta, p);
    Ok(C2Report {
        p,
        h: median_defect.max(leaf_defect),
        median_defect,
        leaf_defect,
        distortion: data.distortion,
        distortion_bound: bound,
        within_bound: data.distortion <= bound + EPS,
        witness,
    })
}

/// [`measure_c2`] followed by a running-max update of `h_table` at `p`.
pub fn verify_c2(cms: &mut CoarseMedianStructure, subset: &[usize]) -> Result<C2Report> {
    let report = measure_c2(cms, subset)?;
    cms.record_h(report.p, report.h);
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub kind: String,
    pub points: Vec<usize>,
    pub value: f64,
}

/// `{"space", "delta", "k", "h0", "h_table", "witnesses"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoarseReport {
    pub space: String,
    pub delta: f64,
    pub k: Option<f64>,
    pub h0: f64,
    pub h_table: BTreeMap<usize, f64>,
    pub witnesses: Vec<Witness>,
}

impl CoarseReport {
    /// Carries forward an earlier report's `h_table` for the same space.
    pub fn merge_previous(&mut self, previous: &CoarseReport) {
        if previous.space != self.space {
            return;
        }
        for (&p, &h) in &previous.h_table {
            let e = self.h_table.entry(p).or_insert(h);
            *e = e.max(h);
        }
        let mut running: f64 = 0.0;
        for v in self.h_table.values_mut() {
            running = running.max(*v);
            *v = running;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree() -> Graph {
        //      0
        //     / \
        //    1   2
        //   / \   \
        //  3   4   5
        Graph::new(6, &[(0, 1), (0, 2), (1, 3), (1, 4), (2, 5)]).unwrap()
    }

    #[test]
    fn tree_median_is_branch_point() {
        let cms = CoarseMedianStructure::new("t", tree()).unwrap();
        assert_eq!(cms.median(3, 4, 5), 1);
        assert_eq!(cms.median(3, 5, 2), 2);
        assert_eq!(cms.median(4, 4, 5), 4);
    }

    #[test]
    fn hexagon_tie_break() {
        let c6 = Graph::cycle(6).unwrap().metric().unwrap();
        for x in [0, 2, 4] {
            let s: f64 = [0, 2, 4].iter().map(|&p| c6.d(x, p)).sum();
            assert_eq!(s, 4.0);
        }
        assert_eq!(coarse_median_point(&c6, 0, 2, 4).unwrap(), 0);
        assert_eq!(coarse_median_point(&c6, 4, 2, 0).unwrap(), 0);
        assert!(coarse_median_point(&c6, 0, 2, 6).is_err());
    }

    #[test]
    fn c1_on_tree() {
        let mut cms = CoarseMedianStructure::new("t", tree()).unwrap();
        assert_eq!(cms.h0, 0.0);
        let r = verify_c1(&mut cms, C1Mode::Exhaustive);
        assert_eq!(r.k, 1.0);
        assert_eq!(cms.k, Some(1.0));
        assert!(r.exhaustive);
    }

    #[test]
    fn adjacent_move_moves_tree_median_by_at_most_one() {
        let g = tree();
        let cms = CoarseMedianStructure::new("t", g.clone()).unwrap();
        let d = cms.space();
        for a in 0..6 {
            for b in 0..6 {
                for c in 0..6 {
                    for &a2 in g.neighbors(a) {
                        assert!(d.d(cms.median(a, b, c), cms.median(a2, b, c)) <= 1.0);
                    }
                }
            }
        }
    }

    #[test]
    fn sampled_c1_is_labelled() {
        let mut cms = CoarseMedianStructure::new("c7", Graph::cycle(7).unwrap()).unwrap();
        let r = verify_c1(
            &mut cms,
            C1Mode::Sampled {
                samples: 5_000,
                seed: 2,
            },
        );
        assert!(!r.exhaustive);
        assert_eq!(r.sextuples, 5_000);
        assert!(r.k.is_finite());
    }

    #[test]
    fn c2_is_exact_on_trees() {
        let mut cms = CoarseMedianStructure::new("t", tree()).unwrap();
        for subset in [vec![3], vec![3, 5], vec![3, 4, 5], vec![0, 3, 4, 5], vec![1, 2, 3, 4, 5]] {
            let r = verify_c2(&mut cms, &subset).unwrap();
            assert_eq!(r.h, 0.0, "{subset:?}");
            assert_eq!(r.distortion, 0.0);
        }
        assert!(measure_c2(&cms, &[]).is_err());
    }

    #[test]
    fn h_table_is_monotone() {
        let mut cms = CoarseMedianStructure::new("c", Graph::cycle(5).unwrap()).unwrap();
        cms.record_h(4, 2.0);
        cms.record_h(2, 1.0);
        cms.record_h(6, 0.5);
        cms.record_h(3, 3.0);
        let values: Vec<f64> = cms.h_table.values().copied().collect();
        assert_eq!(values, vec![1.0, 3.0, 3.0, 3.0]);
    }

    #[test]
    fn report_merge_keeps_running_max() {
        let mut a = CoarseReport {
            space: "x".into(),
            delta: 1.0,
            k: Some(1.0),
            h0: 1.0,
            h_table: [(2, 1.0), (4, 1.0)].into(),
            witnesses: vec![],
        };
        let b = CoarseReport {
            h_table: [(3, 2.0)].into(),
            ..a.clone()
        };
        a.merge_previous(&b);
        assert_eq!(a.h_table, [(2, 1.0), (3, 2.0), (4, 2.0)].into());
    }
}
