use rayon::prelude::*;
use serde::Serialize;

use super::{discretized_walk, step, HomogeneousSpace, WalkConfig};
use crate::error::{invalid, Result};
use crate::induction::{FiniteGroup, PermAction};
use crate::metric::{FiniteMetricSpace, Graph};
use crate::rng::{trial_rng, StreamRng};
use rand::Rng;

/// A source of lattice walks `(γ_n)` together with the displacement
/// `d_X(γ_n . x0, x0)` of each step.
pub trait LatticeWalk: Sync {
    /// Displacements for `n = 1..=steps`; may be shorter if the source ran
    /// out of budget.
    fn distances(&self, steps: usize, rng: &mut StreamRng) -> Vec<f64>;
}

/// Uniform steps on the generators of the free group of the given rank and
/// their inverses, acting on its Cayley tree. Words are kept reduced.
#[derive(Debug, Clone, Copy)]
pub struct FreeGroupWalk {
    pub rank: usize,
}

impl LatticeWalk for FreeGroupWalk {
    fn distances(&self, steps: usize, rng: &mut StreamRng) -> Vec<f64> {
        // Letter 2i is generator i, 2i+1 its inverse.
        let mut word: Vec<usize> = Vec::new();
        (0..steps)
            .map(|_| {
                let l = rng.gen_range(0..2 * self.rank);
                if word.last() == Some(&(l ^ 1)) {
                    word.pop();
                } else {
                    word.push(l);
                }
                word.len() as f64
            })
            .collect()
    }
}

/// The symmetric `±1` walk on the integers acting on the line.
#[derive(Debug, Clone, Copy)]
pub struct IntegerWalk;

impl LatticeWalk for IntegerWalk {
    fn distances(&self, steps: usize, rng: &mut StreamRng) -> Vec<f64> {
        let mut x: i64 = 0;
        (0..steps)
            .map(|_| {
                x += if rng.gen::<bool>() { 1 } else { -1 };
                x.unsigned_abs() as f64
            })
            .collect()
    }
}

/// Uniform steps from `steps_set` in a finite group acting on a finite space.
#[derive(Debug, Clone, Copy)]
pub struct FiniteGroupWalk<'a> {
    pub group: &'a FiniteGroup,
    pub step_set: &'a [usize],
    pub action: &'a PermAction,
    pub space: &'a FiniteMetricSpace,
    pub x0: usize,
}

impl LatticeWalk for FiniteGroupWalk<'_> {
    fn distances(&self, steps: usize, rng: &mut StreamRng) -> Vec<f64> {
        let mut g = self.group.identity();
        (0..steps)
            .map(|_| {
                g = self.group.mul(g, self.step_set[rng.gen_range(0..self.step_set.len())]);
                self.space.d(self.action.act(g, self.x0), self.x0)
            })
            .collect()
    }
}

/// The simple random walk on a graph, measured from its starting vertex.
#[derive(Debug, Clone, Copy)]
pub struct GraphWalk<'a> {
    pub graph: &'a Graph,
    pub space: &'a FiniteMetricSpace,
    pub basepoint: usize,
}

impl LatticeWalk for GraphWalk<'_> {
    fn distances(&self, steps: usize, rng: &mut StreamRng) -> Vec<f64> {
        let mut v = self.basepoint;
        (0..steps)
            .map(|_| {
                v = step(self.graph, v, rng);
                self.space.d(v, self.basepoint)
            })
            .collect()
    }
}

/// The orbit-return walk of a homogeneous graph, pushed to a space on which
/// the lattice acts.
#[derive(Debug, Clone, Copy)]
pub struct DiscretizedDrift<'a> {
    pub hs: &'a HomogeneousSpace,
    pub action: &'a PermAction,
    pub space: &'a FiniteMetricSpace,
    pub x0: usize,
    /// Graph steps allowed per requested lattice step.
    pub budget_factor: usize,
}

impl LatticeWalk for DiscretizedDrift<'_> {
    fn distances(&self, steps: usize, rng: &mut StreamRng) -> Vec<f64> {
        let cfg = WalkConfig {
            basepoint: self.hs.basepoint,
            steps: steps.saturating_mul(self.budget_factor.max(1)),
            trials: 1,
            seed: rng.gen(),
        };
        discretized_walk(self.hs, &cfg, 0, Some(steps), false)
            .map(|w| {
                w.lattice_steps
                    .iter()
                    .map(|&g| self.space.d(self.action.act(g, self.x0), self.x0))
                    .collect()
            })
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DriftEstimate {
    /// `E_n` for `n = 1..=steps`.
    pub means: Vec<f64>,
    /// Per-`n` 95% half-width of `E_n / n`.
    pub per_step_ci: Vec<f64>,
    /// Mean of `E_n / n` over the last half of the trajectory.
    pub slope: f64,
    pub ci_halfwidth: f64,
    pub steps: usize,
    pub trials: usize,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DriftRow {
    pub n: usize,
    pub mean_distance: f64,
    pub slope_estimate: f64,
    pub ci_halfwidth: f64,
}

impl DriftEstimate {
    pub fn rows(&self) -> Vec<DriftRow> {
        self.means
            .iter()
            .zip(&self.per_step_ci)
            .enumerate()
            .map(|(i, (&m, &ci))| DriftRow {
                n: i + 1,
                mean_distance: m,
                slope_estimate: m / (i + 1) as f64,
                ci_halfwidth: ci,
            })
            .collect()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in self.rows() {
            w.serialize(row).map_err(|e| invalid(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| invalid(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| invalid(e.to_string()))
    }
}

const Z95: f64 = 1.959_963_984_540_054;

fn half_width(values: impl Iterator<Item = f64> + Clone, count: usize) -> f64 {
    if count < 2 {
        return 0.0;
    }
    let mean = values.clone().sum::<f64>() / count as f64;
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
    Z95 * (var / count as f64).sqrt()
}

/// Monte Carlo estimate of `E[d(γ_n . x0, x0)] / n` over independent trials.
/// Trials shorter than the others truncate the common horizon.
pub fn estimate_drift(
    source: &impl LatticeWalk,
    steps: usize,
    trials: usize,
    seed: u64,
) -> Result<DriftEstimate> {
    if steps == 0 || trials == 0 {
        return Err(invalid("steps and trials must be positive"));
    }
    let runs: Vec<Vec<f64>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| source.distances(steps, &mut trial_rng(seed, t)))
        .collect();
    let horizon = runs.iter().map(Vec::len).min().unwrap_or(0);
    if horizon == 0 {
        return Err(invalid("a trial produced no lattice steps within budget"));
    }
    let tf = trials as f64;
    let means: Vec<f64> = (0..horizon).map(|i| runs.iter().map(|r| r[i]).sum::<f64>() / tf).collect();
    let per_step_ci = (0..horizon)
        .map(|i| half_width(runs.iter().map(move |r| r[i] / (i + 1) as f64), trials))
        .collect();
    let tail = horizon / 2..horizon;
    let tail_len = tail.len() as f64;
    let per_trial: Vec<f64> = runs
        .iter()
        .map(|r| tail.clone().map(|i| r[i] / (i + 1) as f64).sum::<f64>() / tail_len)
        .collect();
    let slope = per_trial.iter().sum::<f64>() / tf;
    Ok(DriftEstimate {
        means,
        per_step_ci,
        slope,
        ci_halfwidth: half_width(per_trial.iter().copied(), trials),
        steps: horizon,
        trials,
    })
}
