//! Finite metric spaces and graphs: metric intervals, median recognition,
//! l1 products and four-point hyperbolicity.

mod delta;
mod graph;

pub use delta::{estimate_delta, estimate_delta_with, DeltaConfig, DeltaEstimate};
pub use graph::{Graph, GraphFile};

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::median::FiniteMedianAlgebra;
use crate::EPS;

/// Point count above which [`l1_product`] refuses to build a product.
pub const DEFAULT_PRODUCT_BUDGET: usize = 4096;

#[inline]
pub(crate) fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= EPS
}

/// Points `0..n` with a dense distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    n: usize,
    dist: Vec<f64>,
}

/// On-disk form: `{"points": n, "dist": [[...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricFile {
    pub points: usize,
    pub dist: Vec<Vec<f64>>,
}

impl FiniteMetricSpace {
    /// Validates symmetry, zero diagonal, positivity off the diagonal and the
    /// triangle inequality.
    pub fn from_matrix(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(invalid("metric space needs at least one point"));
        }
        let mut dist = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(invalid(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            dist.extend_from_slice(row);
        }
        let space = Self { n, dist };
        space.validate()?;
        Ok(space)
    }

    pub(crate) fn from_trusted(n: usize, dist: Vec<f64>) -> Self {
        debug_assert_eq!(dist.len(), n * n);
        Self { n, dist }
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        for a in 0..n {
            for b in 0..n {
                let d = self.d(a, b);
                if !d.is_finite() || d < 0.0 {
                    return Err(invalid(format!("d({a},{b}) = {d} is not a nonnegative number")));
                }
                if (a == b) != (d == 0.0) {
                    return Err(invalid(format!("d({a},{b}) = {d} violates d(a,b) = 0 iff a = b")));
                }
                if !approx_eq(d, self.d(b, a)) {
                    return Err(invalid(format!("distance is not symmetric at ({a},{b})")));
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.d(a, c) > self.d(a, b) + self.d(b, c) + EPS {
                        return Err(invalid(format!("triangle inequality fails at ({a},{b},{c})")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn d(&self, a: usize, b: usize) -> f64 {
        self.dist[a * self.n + b]
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    pub fn check_point(&self, a: usize) -> Result<()> {
        if a < self.n {
            Ok(())
        } else {
            Err(Error::UnknownElement(a))
        }
    }

    /// The space with points renamed: new point `i` is old point `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(invalid("relabelling must be a permutation of all points"));
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            self.check_point(p)?;
            if std::mem::replace(&mut seen[p], true) {
                return Err(invalid("relabelling repeats a point"));
            }
        }
        let dist = (0..self.n * self.n)
            .map(|ij| self.d(perm[ij / self.n], perm[ij % self.n]))
            .collect();
        Ok(Self::from_trusted(self.n, dist))
    }

    pub(crate) fn interval_set(&self, a: usize, b: usize) -> FixedBitSet {
        let mut set = FixedBitSet::with_capacity(self.n);
        let dab = self.d(a, b);
        for c in 0..self.n {
            if approx_eq(self.d(a, c) + self.d(c, b), dab) {
                set.insert(c);
            }
        }
        set
    }

    /// `[a, b] = {c : d(a, c) + d(c, b) = d(a, b)}`.
    pub fn metric_interval(&self, a: usize, b: usize) -> Result<Vec<usize>> {
        self.check_point(a)?;
        self.check_point(b)?;
        Ok(self.interval_set(a, b).ones().collect())
    }

    pub fn to_file(&self) -> MetricFile {
        MetricFile {
            points: self.n,
            dist: self.dist.chunks(self.n).map(<[f64]>::to_vec).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("metric serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(text)?)
    }

    pub fn from_file(file: MetricFile) -> Result<Self> {
        if file.points != file.dist.len() {
            return Err(invalid(format!(
                "declared {} points but the matrix has {} rows",
                file.points,
                file.dist.len()
            )));
        }
        Self::from_matrix(file.dist)
    }
}

/// A triple whose three pairwise intervals do not meet in exactly one point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MedianWitness {
    pub triple: [usize; 3],
    pub intersection: Vec<usize>,
}

#[derive(Debug, Clone)]
pub enum MedianCheck {
    /// Every triple has a unique median; the induced algebra is attached.
    Median(FiniteMedianAlgebra),
    NotMedian(MedianWitness),
}

impl MedianCheck {
    pub fn is_median(&self) -> bool {
        matches!(self, MedianCheck::Median(_))
    }

    pub fn algebra(&self) -> Option<&FiniteMedianAlgebra> {
        match self {
            MedianCheck::Median(alg) => Some(alg),
            MedianCheck::NotMedian(_) => None,
        }
    }

    pub fn witness(&self) -> Option<&MedianWitness> {
        match self {
            MedianCheck::Median(_) => None,
            MedianCheck::NotMedian(w) => Some(w),
        }
    }
}

/// Decides whether `[a,b] ∩ [b,c] ∩ [c,a]` is a single point for every
/// triple. Triples are scanned with `a < b < c` in lexicographic order, so the
/// witness is the first failing one.
pub fn check_metric_median(space: &FiniteMetricSpace) -> MedianCheck {
    let n = space.len();
    let intervals: Vec<FixedBitSet> = (0..n * n)
        .into_par_iter()
        .map(|ab| space.interval_set(ab / n, ab % n))
        .collect();
    let iv = |a: usize, b: usize| &intervals[a * n + b];

    let rows: Vec<std::result::Result<Vec<(usize, usize, usize)>, MedianWitness>> = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut found = Vec::new();
            for b in a + 1..n {
                let ab = iv(a, b);
                for c in b + 1..n {
                    let mut meet = ab.clone();
                    meet.intersect_with(iv(b, c));
                    meet.intersect_with(iv(c, a));
                    let mut points = meet.ones();
                    match (points.next(), points.next()) {
                        (Some(m), None) => found.push((b, c, m)),
                        _ => {
                            return Err(MedianWitness {
                                triple: [a, b, c],
                                intersection: meet.ones().collect(),
                            })
                        }
                    }
                }
            }
            Ok(found)
        })
        .collect();

    let mut table = vec![0usize; n * n * n];
    for (a, row) in rows.into_iter().enumerate() {
        let row = match row {
            Ok(row) => row,
            Err(w) => return MedianCheck::NotMedian(w),
        };
        for (b, c, m) in row {
            for (x, y, z) in [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
                table[(x * n + y) * n + z] = m;
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            // mu(a,a,b) = mu(a,b,a) = mu(b,a,a) = a
            table[(a * n + a) * n + b] = a;
            table[(a * n + b) * n + a] = a;
            table[(b * n + a) * n + a] = a;
        }
    }
    let labels = (0..n).map(|i| i.to_string()).collect();
    MedianCheck::Median(
        FiniteMedianAlgebra::from_table(labels, table).expect("table has the right shape"),
    )
}

/// Product with the l1 distance; point `(i, j)` has index `i * s2.len() + j`.
pub fn l1_product(
    s1: &FiniteMetricSpace,
    s2: &FiniteMetricSpace,
    budget: usize,
) -> Result<FiniteMetricSpace> {
    let (n1, n2) = (s1.len(), s2.len());
    let n = n1 * n2;
    if n > budget {
        return Err(Error::BudgetExceeded {
            what: "l1 product size",
            limit: budget,
            partial: n,
        });
    }
    let mut dist = Vec::with_capacity(n * n);
    for p in 0..n {
        for q in 0..n {
            dist.push(s1.d(p / n2, q / n2) + s2.d(p % n2, q % n2));
        }
    }
    Ok(FiniteMetricSpace::from_trusted(n, dist))
}

/// Median-graph recognition through the shortest-path metric.
pub fn is_median_graph(g: &Graph) -> Result<MedianCheck> {
    Ok(check_metric_median(&g.metric()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::median::verify_median_axioms;

    #[test]
    fn cube_interval_is_subcube() {
        let q = Graph::hypercube(3).metric().unwrap();
        // 110 = 6, 100 = 4, 010 = 2
        assert_eq!(q.metric_interval(0, 6).unwrap(), vec![0, 2, 4, 6]);
        assert_eq!(q.metric_interval(5, 5).unwrap(), vec![5]);
    }

    #[test]
    fn antipodal_interval_in_hexagon_is_everything() {
        let c6 = Graph::cycle(6).unwrap().metric().unwrap();
        assert_eq!(c6.metric_interval(0, 3).unwrap(), (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn hexagon_is_not_median() {
        let check = is_median_graph(&Graph::cycle(6).unwrap()).unwrap();
        let w = check.witness().unwrap();
        assert_eq!(w.triple, [0, 2, 4]);
        assert!(w.intersection.is_empty());
    }

    #[test]
    fn k23_has_two_medians() {
        let check = is_median_graph(&Graph::complete_bipartite(2, 3)).unwrap();
        let w = check.witness().unwrap();
        assert!(w.intersection.len() >= 2, "{w:?}");
    }

    #[test]
    fn cube_median_is_majority() {
        let check = is_median_graph(&Graph::hypercube(3)).unwrap();
        let alg = check.algebra().unwrap();
        for a in 0..8 {
            for b in 0..8 {
                for c in 0..8 {
                    assert_eq!(alg.median(a, b, c), (a & b) | (b & c) | (a & c));
                }
            }
        }
        assert!(verify_median_axioms(alg).passed());
    }

    #[test]
    fn l1_product_adds_distances() {
        let p3 = Graph::path(3).metric().unwrap();
        let c4 = Graph::cycle(4).unwrap().metric().unwrap();
        let prod = l1_product(&p3, &c4, 100).unwrap();
        // (2, 1) vs (0, 3)
        assert_eq!(prod.d(2 * 4 + 1, 3), 2.0 + 2.0);
        assert!(l1_product(&p3, &c4, 5).is_err());
    }

    #[test]
    fn metric_validation() {
        assert!(FiniteMetricSpace::from_matrix(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(FiniteMetricSpace::from_matrix(vec![vec![0.0, 0.0], vec![0.0, 0.0]]).is_err());
        let bad_triangle = vec![
            vec![0.0, 1.0, 5.0],
            vec![1.0, 0.0, 1.0],
            vec![5.0, 1.0, 0.0],
        ];
        assert!(FiniteMetricSpace::from_matrix(bad_triangle).is_err());
        let ok = FiniteMetricSpace::from_matrix(vec![vec![0.0, 0.5], vec![0.5, 0.0]]).unwrap();
        let text = ok.to_json();
        assert_eq!(FiniteMetricSpace::from_json(&text).unwrap(), ok);
    }
}
