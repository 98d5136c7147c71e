use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::FiniteMetricSpace;

#[derive(Debug, Clone, Copy)]
pub struct DeltaConfig {
    /// Spaces with at most this many points are scanned exhaustively.
    pub exhaustive_limit: usize,
    /// Random 4-tuples drawn for larger spaces.
    pub samples: u64,
    pub seed: u64,
}

impl Default for DeltaConfig {
    fn default() -> Self {
        Self {
            exhaustive_limit: 60,
            samples: 1_000_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DeltaEstimate {
    pub delta: f64,
    /// False when `delta` is a sampled lower bound.
    pub exhaustive: bool,
    pub samples: u64,
    pub witness: Option<[usize; 4]>,
}

/// Half the gap between the two largest of the three pair sums.
#[inline]
fn four_point_defect(space: &FiniteMetricSpace, x: usize, y: usize, z: usize, w: usize) -> f64 {
    let mut sums = [
        space.d(x, y) + space.d(z, w),
        space.d(x, z) + space.d(y, w),
        space.d(x, w) + space.d(y, z),
    ];
    sums.sort_unstable_by(f64::total_cmp);
    (sums[2] - sums[1]) / 2.0
}

pub fn estimate_delta(space: &FiniteMetricSpace) -> DeltaEstimate {
    estimate_delta_with(space, DeltaConfig::default())
}

/// Smallest `delta` for which the four-point condition holds, exact up to
/// `exhaustive_limit` points and a sampled lower bound beyond.
pub fn estimate_delta_with(space: &FiniteMetricSpace, cfg: DeltaConfig) -> DeltaEstimate {
    let n = space.len();
    if n < 4 {
        return DeltaEstimate {
            delta: 0.0,
            exhaustive: true,
            samples: 0,
            witness: None,
        };
    }
    if n <= cfg.exhaustive_limit {
        let best = (0..n)
            .into_par_iter()
            .map(|x| {
                let mut best = (0.0f64, None);
                for y in x + 1..n {
                    for z in y + 1..n {
                        for w in z + 1..n {
                            let d = four_point_defect(space, x, y, z, w);
                            if d > best.0 {
                                best = (d, Some([x, y, z, w]));
                            }
                        }
                    }
                }
                best
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold((0.0, None), |acc, cur| if cur.0 > acc.0 { cur } else { acc });
        let quads = (n as u64) * (n as u64 - 1) * (n as u64 - 2) * (n as u64 - 3) / 24;
        return DeltaEstimate {
            delta: best.0,
            exhaustive: true,
            samples: quads,
            witness: best.1,
        };
    }
    let mut rng = crate::rng::trial_rng(cfg.seed, 0);
    let mut best = (0.0, None);
    for _ in 0..cfg.samples {
        let q: [usize; 4] = std::array::from_fn(|_| rng.gen_range(0..n));
        let d = four_point_defect(space, q[0], q[1], q[2], q[3]);
        if d > best.0 {
            best = (d, Some(q));
        }
    }
    DeltaEstimate {
        delta: best.0,
        exhaustive: false,
        samples: cfg.samples,
        witness: best.1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Graph;

    #[test]
    fn trees_are_zero_hyperbolic() {
        let star = Graph::new(5, &[(0, 1), (0, 2), (0, 3), (3, 4)]).unwrap();
        assert_eq!(estimate_delta(&star.metric().unwrap()).delta, 0.0);
        assert_eq!(estimate_delta(&Graph::path(9).metric().unwrap()).delta, 0.0);
    }

    #[test]
    fn square_has_delta_one() {
        // C4: pair sums 2 + 2 (diagonals) vs 1 + 1.
        let c4 = Graph::cycle(4).unwrap().metric().unwrap();
        assert_eq!(estimate_delta(&c4).delta, 1.0);
    }

    #[test]
    fn sampled_mode_is_labelled() {
        let g = Graph::cycle(8).unwrap().metric().unwrap();
        let cfg = DeltaConfig {
            exhaustive_limit: 4,
            samples: 20_000,
            seed: 1,
        };
        let est = estimate_delta_with(&g, cfg);
        assert!(!est.exhaustive);
        assert_eq!(est.samples, 20_000);
        assert!(est.delta <= estimate_delta(&g).delta);
    }
}
