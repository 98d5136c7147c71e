//! Random walks on graphs and the lattice walks they induce.

mod drift;
mod kac;
mod quasi;
mod translation;

pub use drift::{
    estimate_drift, DiscretizedDrift, DriftEstimate, DriftRow, FiniteGroupWalk, FreeGroupWalk,
    GraphWalk, IntegerWalk, LatticeWalk,
};
pub use kac::{kac_check, KacReport};
pub use quasi::{quasi_action_check, ConditionReport, QuasiActionReport, QuasiSamples};
pub use translation::{
    translation_length, Displacement, FreeWordPower, LineShift, OrbitPower, TranslationReport,
    DEFAULT_LOXODROMIC_THRESHOLD,
};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::induction::{build_transversal, FiniteGroup, PermAction, Transversal};
use crate::metric::Graph;
use crate::rng::{trial_rng, StreamRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub basepoint: usize,
    pub steps: usize,
    pub trials: usize,
    pub seed: u64,
}

impl WalkConfig {
    pub fn validate(&self, graph: &Graph) -> Result<()> {
        if self.steps == 0 || self.trials == 0 {
            return Err(invalid("steps and trials must be positive"));
        }
        if self.basepoint >= graph.vertex_count() {
            return Err(crate::Error::UnknownElement(self.basepoint));
        }
        if !graph.is_connected() {
            return Err(invalid("the walk graph must be connected"));
        }
        if graph.vertex_count() < 2 {
            return Err(invalid("a simple walk needs a vertex with a neighbor"));
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn step(graph: &Graph, v: usize, rng: &mut StreamRng) -> usize {
    let nbrs = graph.neighbors(v);
    nbrs[rng.gen_range(0..nbrs.len())]
}

/// Vertex sequence `p_0, ..., p_steps` of trial `trial`.
pub fn simple_walk(graph: &Graph, cfg: &WalkConfig, trial: u64) -> Result<Vec<usize>> {
    cfg.validate(graph)?;
    let mut rng = trial_rng(cfg.seed, trial);
    let mut trace = Vec::with_capacity(cfg.steps + 1);
    let mut v = cfg.basepoint;
    trace.push(v);
    for _ in 0..cfg.steps {
        v = step(graph, v, &mut rng);
        trace.push(v);
    }
    Ok(trace)
}

/// A finite group `G` acting on a graph `M` by automorphisms, with a lattice
/// `Γ` acting freely on the orbit of the basepoint.
#[derive(Debug, Clone)]
pub struct HomogeneousSpace {
    pub group: FiniteGroup,
    pub graph: Graph,
    pub action: PermAction,
    pub lattice: Vec<usize>,
    pub transversal: Transversal,
    pub basepoint: usize,
    /// `orbit[x] = Some(γ)` when `x = γ . p0`.
    orbit: Vec<Option<usize>>,
}

impl HomogeneousSpace {
    pub fn new(
        group: FiniteGroup,
        graph: Graph,
        given: &std::collections::BTreeMap<usize, Vec<usize>>,
        gens: &[usize],
        mut lattice: Vec<usize>,
        basepoint: usize,
    ) -> Result<Self> {
        lattice.sort_unstable();
        lattice.dedup();
        let n = graph.vertex_count();
        if basepoint >= n {
            return Err(crate::Error::UnknownElement(basepoint));
        }
        let all: Vec<usize> = (0..group.order()).collect();
        let action = PermAction::generate(&group, n, given, gens, &all)?;
        for &s in gens {
            for (u, v) in graph.edges() {
                if !graph.has_edge(action.act(s, u), action.act(s, v)) {
                    return Err(invalid(format!("element {s} does not preserve edge ({u},{v})")));
                }
            }
        }
        let transversal = build_transversal(&group, &lattice)?;
        let mut orbit = vec![None; n];
        for &g in &lattice {
            let x = action.act(g, basepoint);
            if orbit[x].replace(g).is_some() {
                return Err(invalid("the stabilizer of the basepoint in the lattice is nontrivial"));
            }
        }
        Ok(Self {
            group,
            graph,
            action,
            lattice,
            transversal,
            basepoint,
            orbit,
        })
    }

    /// The unique `γ` with `x = γ . p0`, if `x` lies in the orbit.
    pub fn orbit_element(&self, x: usize) -> Option<usize> {
        self.orbit[x]
    }

    /// Lattice orbits on the vertices, numbered by smallest member.
    pub fn quotient_classes(&self) -> (Vec<usize>, usize) {
        let n = self.graph.vertex_count();
        let mut class = vec![usize::MAX; n];
        let mut count = 0;
        for x in 0..n {
            if class[x] == usize::MAX {
                for &g in &self.lattice {
                    class[self.action.act(g, x)] = count;
                }
                count += 1;
            }
        }
        (class, count)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiscretizedWalk {
    pub stopping_times: Vec<usize>,
    pub lattice_steps: Vec<usize>,
    pub shift: usize,
    /// Fewer returns than requested happened within the step budget.
    pub incomplete: bool,
    pub strict: bool,
}

/// Runs `q_t = h^-1 . p_t` for `cfg.steps` steps and records every return
/// to the orbit `Γ . p0` (or to `p0` itself when `strict`), stopping early
/// after `target` returns.
pub fn discretized_walk(
    hs: &HomogeneousSpace,
    cfg: &WalkConfig,
    trial: u64,
    target: Option<usize>,
    strict: bool,
) -> Result<DiscretizedWalk> {
    let cfg = WalkConfig {
        basepoint: hs.basepoint,
        ..*cfg
    };
    cfg.validate(&hs.graph)?;
    let mut rng = trial_rng(cfg.seed, trial);
    let grp = &hs.group;
    let h = hs.transversal.reps[rng.gen_range(0..hs.transversal.len())];
    let h_inv = grp.inv(h);
    let mut p = hs.basepoint;
    let mut stopping_times = Vec::new();
    let mut lattice_steps = Vec::new();
    let wanted = target.unwrap_or(usize::MAX);
    for t in 1..=cfg.steps {
        if lattice_steps.len() >= wanted {
            break;
        }
        p = step(&hs.graph, p, &mut rng);
        let q = hs.action.act(h_inv, p);
        if let Some(gamma) = hs.orbit_element(q) {
            if !strict || gamma == grp.identity() {
                stopping_times.push(t);
                lattice_steps.push(gamma);
            }
        }
    }
    Ok(DiscretizedWalk {
        incomplete: lattice_steps.len() < target.unwrap_or(1),
        stopping_times,
        lattice_steps,
        shift: h,
        strict,
    })
}

/// Output shape of the `walk` report.
#[derive(Debug, Clone, Serialize)]
pub struct WalkReport {
    pub config: WalkConfig,
    pub drift: f64,
    pub ci: f64,
    pub kac: KacSummary,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct KacSummary {
    pub empirical: f64,
    pub predicted: f64,
}
