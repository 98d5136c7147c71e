use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use super::{step, HomogeneousSpace, WalkConfig};
use crate::error::{invalid, Result};
use crate::rng::trial_rng;

#[derive(Debug, Clone, Serialize)]
pub struct KacReport {
    pub classes: usize,
    /// Stationary law of the quotient chain, indexed by class.
    pub stationary: Vec<f64>,
    pub period: usize,
    /// `1 / λ([p0])`.
    pub predicted: f64,
    /// Mean gap between visits to `[p0]`, pooled over trials.
    pub empirical: f64,
    pub returns: u64,
    pub relative_error: f64,
}

/// Compares the exact stationary law of the quotient chain on `Γ \ M` with
/// the observed mean return time to the class of the basepoint.
pub fn kac_check(hs: &HomogeneousSpace, cfg: &WalkConfig) -> Result<KacReport> {
    let cfg = WalkConfig {
        basepoint: hs.basepoint,
        ..*cfg
    };
    cfg.validate(&hs.graph)?;
    let (class, m) = hs.quotient_classes();
    let graph = &hs.graph;
    let mut rep = vec![usize::MAX; m];
    for (x, &c) in class.iter().enumerate() {
        if rep[c] == usize::MAX {
            rep[c] = x;
        }
    }
    let mut p = DMatrix::<f64>::zeros(m, m);
    for (c, &x) in rep.iter().enumerate() {
        let deg = graph.degree(x) as f64;
        for &y in graph.neighbors(x) {
            p[(c, class[y])] += 1.0 / deg;
        }
    }
    let stationary = stationary_law(&p)?;
    let period = period(&p, m);
    let c0 = class[hs.basepoint];
    let predicted = 1.0 / stationary[c0];

    let gaps: Vec<(u64, u64)> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, t);
            let (mut v, mut last, mut total, mut count) = (hs.basepoint, 0u64, 0u64, 0u64);
            for s in 1..=cfg.steps as u64 {
                v = step(graph, v, &mut rng);
                if class[v] == c0 {
                    total += s - last;
                    count += 1;
                    last = s;
                }
            }
            (total, count)
        })
        .collect();
    let (total, returns) = gaps.iter().fold((0, 0), |(a, b), &(t, c)| (a + t, b + c));
    if returns == 0 {
        return Err(invalid("no return to the basepoint class within the step budget"));
    }
    let empirical = total as f64 / returns as f64;
    Ok(KacReport {
        classes: m,
        stationary,
        period,
        predicted,
        empirical,
        returns,
        relative_error: (empirical - predicted).abs() / predicted,
    })
}

/// Solves `π P = π`, `Σ π = 1`. For an irreducible chain this is unique
/// whatever the period, and equals the Cesàro limit of the occupation law.
fn stationary_law(p: &DMatrix<f64>) -> Result<Vec<f64>> {
    let m = p.nrows();
    let mut a = p.transpose() - DMatrix::<f64>::identity(m, m);
    for j in 0..m {
        a[(m - 1, j)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(m);
    b[m - 1] = 1.0;
    let pi = a
        .lu()
        .solve(&b)
        .ok_or_else(|| invalid("quotient chain is not irreducible"))?;
    if pi.iter().any(|&x| x.is_nan() || x <= 0.0) {
        return Err(invalid("quotient chain is not irreducible"));
    }
    Ok(pi.iter().copied().collect())
}

/// gcd of `level(u) + 1 - level(v)` over the transitions of the chain.
fn period(p: &DMatrix<f64>, m: usize) -> usize {
    let mut level = vec![usize::MAX; m];
    level[0] = 0;
    let mut queue = std::collections::VecDeque::from([0]);
    while let Some(u) = queue.pop_front() {
        for v in 0..m {
            if p[(u, v)] > 0.0 && level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut g = 0usize;
    for u in 0..m {
        for v in 0..m {
            if p[(u, v)] > 0.0 {
                g = gcd(g, (level[u] + 1).abs_diff(level[v]));
            }
        }
    }
    g.max(1)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::induction::FiniteGroup;
    use crate::metric::Graph;

    fn trivial(graph: Graph) -> HomogeneousSpace {
        HomogeneousSpace::new(FiniteGroup::cyclic(1), graph, &BTreeMap::new(), &[], vec![0], 0).unwrap()
    }

    fn cfg(steps: usize, trials: usize) -> WalkConfig {
        WalkConfig { basepoint: 0, steps, trials, seed: 3 }
    }

    #[test]
    fn regular_graph_predicts_vertex_count() {
        let r = kac_check(&trivial(Graph::hypercube(3)), &cfg(100_000, 4)).unwrap();
        assert!((r.predicted - 8.0).abs() < 1e-9);
        assert!(r.stationary.iter().all(|&x| (x - 0.125).abs() < 1e-12));
        assert_eq!(r.period, 2);
        assert!(r.relative_error < 0.05, "{r:?}");
    }

    #[test]
    fn single_class_returns_every_step() {
        let given = BTreeMap::from([(1, vec![1, 2, 3, 4, 5, 0])]);
        let hs = HomogeneousSpace::new(
            FiniteGroup::cyclic(6),
            Graph::cycle(6).unwrap(),
            &given,
            &[1],
            (0..6).collect(),
            0,
        )
        .unwrap();
        let r = kac_check(&hs, &cfg(1000, 2)).unwrap();
        assert_eq!(r.classes, 1);
        assert_eq!(r.empirical, 1.0);
        assert_eq!(r.predicted, 1.0);
    }

    #[test]
    fn odd_cycle_is_aperiodic() {
        let r = kac_check(&trivial(Graph::cycle(5).unwrap()), &cfg(10, 1)).unwrap();
        assert_eq!(r.period, 1);
    }
}
