use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::induction::{FiniteGroup, WordMetric};
use crate::metric::FiniteMetricSpace;
use crate::rng::trial_rng;
use crate::EPS;

/// Candidate multiplicative constants tried for each condition.
const K_LADDER: std::ops::RangeInclusive<u32> = 20..=80;
const K_STEP: f64 = 0.05;
/// Extent buckets compared when looking for growth of the additive constant.
const GROWTH_BUCKETS: usize = 4;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiSamples {
    /// `(g, h, x)`, used by the Lipschitz and composition conditions.
    pub triples: Vec<[usize; 3]>,
    /// `(g, x, x')`, used by the quasi-isometry condition.
    pub pairs: Vec<[usize; 3]>,
}

impl QuasiSamples {
    pub fn exhaustive(order: usize, points: usize) -> Self {
        let mut s = Self::default();
        for g in 0..order {
            for h in 0..order {
                s.triples.extend((0..points).map(|x| [g, h, x]));
            }
            for x in 0..points {
                s.pairs.extend((0..points).map(|y| [g, x, y]));
            }
        }
        s
    }

    pub fn sampled(order: usize, points: usize, count: usize, seed: u64) -> Self {
        let mut rng = trial_rng(seed, 0);
        let mut draw = |bound: usize| rng.gen_range(0..bound);
        let triples = (0..count).map(|_| [draw(order), draw(order), draw(points)]).collect();
        let pairs = (0..count).map(|_| [draw(order), draw(points), draw(points)]).collect();
        Self { triples, pairs }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub k: f64,
    pub c: f64,
    /// Sample attaining `c` at the chosen `k`.
    pub witness: Option<[usize; 3]>,
    /// Smallest additive constant per extent bucket, smallest extents first.
    pub c_by_extent: Vec<f64>,
    pub unbounded_growth: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuasiActionReport {
    pub quasi_isometry: ConditionReport,
    pub lipschitz: ConditionReport,
    pub composition: ConditionReport,
    pub k: f64,
    pub c: f64,
    pub unbounded_growth: bool,
}

/// One sample: its extent and the excess as a function of `k`.
struct Sample {
    extent: f64,
    tuple: [usize; 3],
    /// `(a, b, c)` with defect `max(a - k b, c / k - a)`; `c = -inf` for one-sided.
    terms: (f64, f64, f64),
}

impl Sample {
    fn defect(&self, k: f64) -> f64 {
        let (a, b, c) = self.terms;
        (a - k * b).max(c / k - a).max(0.0)
    }
}

fn condition(samples: &[Sample], fixed_k: Option<f64>) -> ConditionReport {
    let worst = |k: f64, set: &[&Sample]| {
        set.iter().fold((0.0, None), |acc: (f64, Option<[usize; 3]>), s| {
            let d = s.defect(k);
            if d > acc.0 + EPS { (d, Some(s.tuple)) } else { acc }
        })
    };
    let all: Vec<&Sample> = samples.iter().collect();
    let (k, (c, witness)) = match fixed_k {
        Some(k) => (k, worst(k, &all)),
        None => K_LADDER
            .map(|i| f64::from(i) * K_STEP)
            .map(|k| (k, worst(k, &all)))
            .fold(None, |best: Option<(f64, (f64, Option<[usize; 3]>))>, cand| match best {
                Some(b) if b.0 + b.1 .0 <= cand.0 + cand.1 .0 + EPS => Some(b),
                _ => Some(cand),
            })
            .expect("ladder is nonempty"),
    };
    let mut sorted = all;
    sorted.sort_by(|a, b| a.extent.total_cmp(&b.extent));
    let chunk = sorted.len().div_ceil(GROWTH_BUCKETS).max(1);
    let c_by_extent: Vec<f64> = sorted.chunks(chunk).map(|b| worst(k, b).0).collect();
    let unbounded_growth = c_by_extent.len() >= 3 && c_by_extent.windows(2).all(|w| w[1] > w[0] + EPS);
    ConditionReport {
        k,
        c,
        witness,
        c_by_extent,
        unbounded_growth,
    }
}

/// Measures the three quasi-action constants of `table[g][x] = g . x` on the
/// given samples: each `x -> g . x` is a `(K, C)`-quasi-isometry, each
/// `g -> g . x` is coarsely `(K, C)`-Lipschitz, and
/// `d(g . (h . x), (gh) . x) <= C`. `K` is chosen on a fixed ladder in
/// `[1, 4]` to minimise `K + C`.
pub fn quasi_action_check(
    table: &[Vec<usize>],
    group: &FiniteGroup,
    word_metric: &WordMetric,
    space: &FiniteMetricSpace,
    samples: &QuasiSamples,
) -> Result<QuasiActionReport> {
    if samples.triples.is_empty() || samples.pairs.is_empty() {
        return Err(invalid("quasi-action check needs at least one triple and one pair"));
    }
    let n = space.len();
    if table.len() != group.order() || table.iter().any(|row| row.len() != n || row.iter().any(|&y| y >= n)) {
        return Err(invalid("action table must have one row of points per group element"));
    }
    let check = |g: usize, x: usize| -> Result<()> {
        group.check_element(g)?;
        if x >= n {
            return Err(Error::UnknownElement(x));
        }
        Ok(())
    };
    let dg = |g: usize, h: usize| -> Result<f64> {
        word_metric
            .dist(group, g, h)
            .map(f64::from)
            .ok_or_else(|| invalid("word metric does not cover the group"))
    };
    let mut qi = Vec::with_capacity(samples.pairs.len());
    for &[g, x, y] in &samples.pairs {
        check(g, x)?;
        check(g, y)?;
        let (d, d2) = (space.d(x, y), space.d(table[g][x], table[g][y]));
        qi.push(Sample { extent: d, tuple: [g, x, y], terms: (d2, d, d) });
    }
    let mut lip = Vec::with_capacity(samples.triples.len());
    let mut comp = Vec::with_capacity(samples.triples.len());
    let e = group.identity();
    for &[g, h, x] in &samples.triples {
        check(g, x)?;
        check(h, x)?;
        let dgh = dg(g, h)?;
        lip.push(Sample {
            extent: dgh,
            tuple: [g, h, x],
            terms: (space.d(table[g][x], table[h][x]), dgh, f64::NEG_INFINITY),
        });
        let defect = space.d(table[g][table[h][x]], table[group.mul(g, h)][x]);
        comp.push(Sample {
            extent: dg(g, e)?.max(dg(h, e)?),
            tuple: [g, h, x],
            terms: (defect, 0.0, f64::NEG_INFINITY),
        });
    }
    let quasi_isometry = condition(&qi, None);
    let lipschitz = condition(&lip, None);
    let composition = condition(&comp, Some(1.0));
    Ok(QuasiActionReport {
        k: quasi_isometry.k.max(lipschitz.k),
        c: quasi_isometry.c.max(lipschitz.c).max(composition.c),
        unbounded_growth: quasi_isometry.unbounded_growth
            || lipschitz.unbounded_growth
            || composition.unbounded_growth,
        quasi_isometry,
        lipschitz,
        composition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Graph;

    fn cyclic_setup(n: usize) -> (FiniteGroup, WordMetric) {
        let g = FiniteGroup::cyclic(n);
        let all: Vec<usize> = (0..n).collect();
        let wm = g.word_metric(&[1, n - 1], &all).unwrap();
        (g, wm)
    }

    #[test]
    fn isometric_action_has_trivial_constants() {
        let (g, wm) = cyclic_setup(8);
        let space = Graph::cycle(8).unwrap().metric().unwrap();
        let table: Vec<Vec<usize>> = (0..8).map(|a| (0..8).map(|x| (x + a) % 8).collect()).collect();
        let r = quasi_action_check(&table, &g, &wm, &space, &QuasiSamples::exhaustive(8, 8)).unwrap();
        assert_eq!((r.k, r.c), (1.0, 0.0));
        assert!(!r.unbounded_growth);
    }

    #[test]
    fn conjugated_action_has_finite_constants() {
        // Rotation of C8 transported to C16 by x -> 2x with inverse y -> y / 2.
        let (g, wm) = cyclic_setup(8);
        let space = Graph::cycle(16).unwrap().metric().unwrap();
        let table: Vec<Vec<usize>> =
            (0..8).map(|a| (0..16).map(|y| 2 * ((y / 2 + a) % 8)).collect()).collect();
        let r = quasi_action_check(&table, &g, &wm, &space, &QuasiSamples::exhaustive(8, 16)).unwrap();
        assert_eq!(r.composition.c, 0.0);
        assert!(r.c > 0.0 && r.c <= 2.0, "{r:?}");
        assert!(r.k <= 2.0);
    }

    #[test]
    fn composition_violation_is_witnessed() {
        let (g, wm) = cyclic_setup(4);
        let space = Graph::path(10).metric().unwrap();
        let mut table: Vec<Vec<usize>> = (0..4).map(|_| (0..10).collect()).collect();
        table[1] = vec![9; 10];
        let r = quasi_action_check(&table, &g, &wm, &space, &QuasiSamples::exhaustive(4, 10)).unwrap();
        assert_eq!(r.composition.c, 9.0);
        let [a, b, x] = r.composition.witness.unwrap();
        assert_eq!(space.d(table[a][table[b][x]], table[(a + b) % 4][x]), 9.0);
    }

    #[test]
    fn empty_samples_are_rejected() {
        let (g, wm) = cyclic_setup(2);
        let space = Graph::path(2).metric().unwrap();
        let table = vec![vec![0, 1], vec![1, 0]];
        assert!(quasi_action_check(&table, &g, &wm, &space, &QuasiSamples::default()).is_err());
    }
}
