//! Desk-scale acceptance checks shared by the test suite and `check-all`.
//!
//! Every check returns a [`CriterionResult`] whose text depends only on the
//! corpus and the seed, so reports are byte-reproducible. Wall-clock limits
//! are enforced by the callers, never recorded here.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::coarse::{measure_c2, verify_c1, C1Mode, CoarseMedianStructure};
use crate::corpus::{trees, Corpus, MAX_TREE_VERTICES};
use crate::induction::{induce_space, verify_induced_action, InduceMode, VerifyConfig};
use crate::median::{find_wall, free_median_algebra, verify_median_axioms, FiniteMedianAlgebra};
use crate::metric::{is_median_graph, Graph};
use crate::raag::{compute_dsl, prec_max, DslMode};
use crate::rng::trial_rng;
use crate::walks::{
    estimate_drift, kac_check, quasi_action_check, translation_length, FiniteGroupWalk,
    FreeGroupWalk, IntegerWalk, LineShift, OrbitPower, QuasiSamples, WalkConfig,
    DEFAULT_LOXODROMIC_THRESHOLD,
};
use crate::{Result, EPS};

pub const CRITERIA: [(u8, &str); 12] = [
    (1, "median axioms"),
    (2, "free median algebra sizes"),
    (3, "walls separate points"),
    (4, "median graph recognition"),
    (5, "coarse median constants"),
    (6, "induction exactness"),
    (7, "positive drift"),
    (8, "zero drift"),
    (9, "return times"),
    (10, "loxodromic classification"),
    (11, "SL-dimension"),
    (12, "determinism"),
];

/// Suggested wall-clock limit in seconds, where one is part of the criterion.
pub fn time_limit(id: u8) -> Option<u64> {
    match id {
        1 => Some(10),
        2 | 7 => Some(60),
        6 => Some(120),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: Vec<String>,
}

struct Log {
    passed: bool,
    lines: Vec<String>,
}

impl Log {
    fn new() -> Self {
        Self {
            passed: true,
            lines: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.passed &= ok;
        self.lines.push(format!("{} {line}", if ok { "ok" } else { "FAIL" }));
    }

    fn finish(self, id: u8) -> CriterionResult {
        CriterionResult {
            id,
            name: CRITERIA[id as usize - 1].1.to_string(),
            passed: self.passed,
            detail: self.lines,
        }
    }
}

/// Runs criterion `id`; errors inside a check count as failures.
pub fn run_criterion(id: u8, corpus: &Corpus, seed: u64) -> CriterionResult {
    let mut log = Log::new();
    let outcome = match id {
        1 => median_axioms(&mut log),
        2 => free_sizes(&mut log),
        3 => walls(&mut log),
        4 => median_graphs(&mut log),
        5 => coarse_constants(&mut log, corpus, seed),
        6 => induction(&mut log, corpus),
        7 => positive_drift(&mut log, seed),
        8 => zero_drift(&mut log, corpus, seed),
        9 => return_times(&mut log, corpus, seed),
        10 => loxodromic(&mut log, corpus),
        11 => sl_dimension(&mut log, seed),
        12 => determinism(&mut log, corpus, seed),
        _ => {
            log.check(false, format!("unknown criterion {id}"));
            Ok(())
        }
    };
    if let Err(e) = outcome {
        log.check(false, format!("error: {e}"));
    }
    log.finish(id)
}

pub fn run_all(corpus: &Corpus, seed: u64) -> Vec<CriterionResult> {
    CRITERIA.iter().map(|&(id, _)| run_criterion(id, corpus, seed)).collect()
}

fn tree_algebra(g: &Graph) -> Result<FiniteMedianAlgebra> {
    is_median_graph(g)?
        .algebra()
        .cloned()
        .ok_or_else(|| crate::error::invalid("tree metric is not median"))
}

fn median_axioms(log: &mut Log) -> Result<()> {
    for n in 1..=4 {
        let r = verify_median_axioms(&FiniteMedianAlgebra::boolean_power(n)?);
        log.check(r.passed() && r.exhaustive, format!("cube {{0,1}}^{n}: {} quintuples", r.quintuples_checked));
    }
    for n in 1..=MAX_TREE_VERTICES {
        let mut failures = 0;
        let all = trees(n);
        for t in &all {
            let r = verify_median_axioms(&tree_algebra(t)?);
            if !(r.passed() && r.exhaustive) {
                failures += 1;
            }
        }
        log.check(failures == 0, format!("{} trees on {n} vertices, {failures} failures", all.len()));
    }
    for n in 1..=3 {
        let free = free_median_algebra(n, 1 << 16)?;
        let r = verify_median_axioms(&free.algebra);
        log.check(r.passed() && r.exhaustive, format!("free algebra on {n} generators"));
    }
    Ok(())
}

/// Majority closure over explicit coordinate lists, independent of the
/// packed representation used by [`free_median_algebra`].
pub fn majority_closure_size(n: usize) -> usize {
    let coords = 1usize << n;
    let gens: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..coords).map(|s| s >> i & 1 == 1).collect())
        .collect();
    let mut set: BTreeSet<Vec<bool>> = gens.into_iter().collect();
    loop {
        let elems: Vec<Vec<bool>> = set.iter().cloned().collect();
        let mut added = false;
        for a in &elems {
            for b in &elems {
                for c in &elems {
                    let m: Vec<bool> = (0..coords)
                        .map(|k| (a[k] as u8 + b[k] as u8 + c[k] as u8) >= 2)
                        .collect();
                    added |= set.insert(m);
                }
            }
        }
        if !added {
            return set.len();
        }
    }
}

fn free_sizes(log: &mut Log) -> Result<()> {
    for (n, known) in [(1, Some(1)), (2, Some(2)), (3, Some(4)), (4, None)] {
        let size = free_median_algebra(n, 1 << 16)?.algebra.len();
        let oracle = majority_closure_size(n);
        let ok = size == oracle && known.is_none_or(|k| k == size);
        log.check(ok, format!("n = {n}: {size} elements, closure oracle {oracle}"));
    }
    Ok(())
}

/// Median algebras with at most 64 elements used for the wall check.
pub fn wall_corpus() -> Result<Vec<(String, FiniteMedianAlgebra)>> {
    let mut out = Vec::new();
    for n in 1..=4 {
        out.push((format!("cube{n}"), FiniteMedianAlgebra::boolean_power(n)?));
    }
    for n in 2..=MAX_TREE_VERTICES {
        for (i, t) in trees(n).iter().enumerate() {
            out.push((format!("tree{n}_{i}"), tree_algebra(t)?));
        }
    }
    for n in 2..=4 {
        out.push((format!("free{n}"), free_median_algebra(n, 64)?.algebra));
    }
    let graphs = [
        ("grid3x3", Graph::grid(3, 3)),
        ("grid4x4", Graph::grid(4, 4)),
        ("cube3_x_path3", Graph::hypercube(3).box_product(&Graph::path(3))),
        ("k13_x_path3", Graph::complete_bipartite(1, 3).box_product(&Graph::path(3))),
    ];
    for (name, g) in graphs {
        out.push((name.to_string(), tree_algebra(&g)?));
    }
    Ok(out)
}

fn walls(log: &mut Log) -> Result<()> {
    let corpus = wall_corpus()?;
    let (pairs, failures): (usize, Vec<String>) = corpus
        .par_iter()
        .map(|(name, alg)| {
            let n = alg.len();
            let mut bad = Vec::new();
            for x in 0..n {
                for y in 0..n {
                    if x == y {
                        continue;
                    }
                    let ok = find_wall(alg, x, y)
                        .and_then(|h| Ok(h.is_valid_wall(alg)? && h.separates(x, y)))
                        .unwrap_or(false);
                    if !ok {
                        bad.push(format!("{name}:({x},{y})"));
                    }
                }
            }
            (n * (n - 1), bad)
        })
        .reduce(|| (0, Vec::new()), |a, b| (a.0 + b.0, [a.1, b.1].concat()));
    log.check(
        failures.is_empty(),
        format!("{} algebras, {pairs} ordered pairs, {} failures {:?}", corpus.len(), failures.len(), failures.first()),
    );
    Ok(())
}

fn median_graphs(log: &mut Log) -> Result<()> {
    let mut positives = vec![("Q4".to_string(), Graph::hypercube(4))];
    for (a, b) in [(2, 3), (3, 4), (5, 5)] {
        positives.push((format!("P{a}xP{b}"), Graph::path(a).box_product(&Graph::path(b))));
    }
    positives.push(("P2xP3xP4".into(), Graph::path(2).box_product(&Graph::path(3)).box_product(&Graph::path(4))));
    for (name, g) in &positives {
        log.check(is_median_graph(g)?.is_median(), format!("{name} is median"));
    }
    let mut tree_failures = 0;
    for n in 1..=MAX_TREE_VERTICES {
        for t in trees(n) {
            tree_failures += usize::from(!is_median_graph(&t)?.is_median());
        }
    }
    log.check(tree_failures == 0, format!("all trees up to {MAX_TREE_VERTICES} vertices are median"));
    for (name, g) in [("K23", Graph::complete_bipartite(2, 3)), ("C6", Graph::cycle(6)?)] {
        let check = is_median_graph(&g)?;
        let witness = check.witness().cloned();
        log.check(
            witness.is_some(),
            format!("{name} is not median, witness {:?}", witness.map(|w| (w.triple, w.intersection))),
        );
    }
    Ok(())
}

/// Every subset of `0..n` with `1 <= size <= max`.
fn small_subsets(n: usize, max: usize) -> Vec<Vec<usize>> {
    (1u32..1 << n)
        .filter(|m| m.count_ones() as usize <= max)
        .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
        .collect()
}

/// Subsets drawn for the distortion check on the hyperbolic corpus.
const DISTORTION_SUBSETS_PER_SIZE: usize = 200;

fn coarse_constants(log: &mut Log, corpus: &Corpus, seed: u64) -> Result<()> {
    for n in 2..=MAX_TREE_VERTICES {
        let all = trees(n);
        let subsets = small_subsets(n, 6);
        let bad: Vec<String> = all
            .par_iter()
            .enumerate()
            .filter_map(|(i, t)| {
                let mut cms = CoarseMedianStructure::new(format!("tree{n}_{i}"), t.clone()).ok()?;
                let c1 = verify_c1(&mut cms, C1Mode::Exhaustive);
                if !(c1.exhaustive && (c1.k - 1.0).abs() < EPS && c1.h0 == 0.0) {
                    return Some(format!("tree{n}_{i}: k = {}, h0 = {}", c1.k, c1.h0));
                }
                let worst = subsets
                    .iter()
                    .map(|s| measure_c2(&cms, s).map(|r| r.h).unwrap_or(f64::INFINITY))
                    .fold(0.0, f64::max);
                (worst > 0.0).then(|| format!("tree{n}_{i}: h = {worst}"))
            })
            .collect();
        log.check(
            bad.is_empty(),
            format!("{} trees on {n} vertices: k = 1, h0 = 0, h(p <= 6) = 0 {:?}", all.len(), bad.first()),
        );
    }
    for (name, g) in &corpus.graphs {
        let cms = CoarseMedianStructure::new(name.clone(), g.clone())?;
        let n = g.vertex_count();
        let mut rng = trial_rng(seed, 0);
        let points: Vec<usize> = (0..n).collect();
        let mut worst: (f64, f64, usize) = (0.0, 0.0, 0);
        let mut ok = true;
        for p in 1..=8.min(n) {
            let subsets: Vec<Vec<usize>> = if p <= 2 {
                small_subsets(n, p).into_iter().filter(|s| s.len() == p).collect()
            } else {
                (0..DISTORTION_SUBSETS_PER_SIZE)
                    .map(|_| points.choose_multiple(&mut rng, p).copied().collect())
                    .collect()
            };
            for s in subsets {
                let r = measure_c2(&cms, &s)?;
                ok &= r.within_bound;
                if r.distortion > worst.0 || worst.2 == 0 {
                    worst = (r.distortion, r.distortion_bound, p);
                }
            }
        }
        log.check(
            ok,
            format!(
                "{name}: delta = {}, every distortion within 4 delta (ceil(log2 p) + 1) for p <= 8; largest {} at p = {} (bound {})",
                cms.delta, worst.0, worst.2, worst.1
            ),
        );
    }
    Ok(())
}

fn induction(log: &mut Log, corpus: &Corpus) -> Result<()> {
    for inst in &corpus.induction {
        let mut fga = inst.build()?;
        let ind = induce_space(&fga, InduceMode::Full)?;
        let r = verify_induced_action(&mut fga, &ind, VerifyConfig::default());
        let exhaustive = r.cocycle.exhaustive
            && r.action_law.exhaustive
            && r.isometry.exhaustive
            && r.c1.exhaustive
            && r.c_y_exhaustive
            && r.orbit_bound.exhaustive
            && !r.sampled;
        log.check(
            r.passed && exhaustive && fga.group.order() <= 48,
            format!(
                "{}: |G| = {}, |Y| = {}, cocycle {}, law {}, isometry {}, C1(k = {}, h0 = {}) {}, C_Y = {} <= C_X = {}, alpha = {} orbit bound {}",
                inst.name,
                fga.group.order(),
                r.induced_points,
                r.cocycle.passed,
                r.action_law.passed,
                r.isometry.passed,
                r.k,
                r.h0,
                r.c1.passed,
                r.c_y,
                r.c_x,
                r.alpha,
                r.orbit_bound.passed
            ),
        );
    }
    log.check(corpus.induction.len() >= 3, format!("{} instances", corpus.induction.len()));
    Ok(())
}

/// Exact `E[|w_n|]` for the reduced-word walk on the free group of rank `r`:
/// the length is a birth-death chain that leaves 0 surely and otherwise grows
/// with probability `(2r - 1) / 2r`.
pub fn free_group_expected_lengths(rank: usize, steps: usize) -> Vec<f64> {
    let up = (2 * rank - 1) as f64 / (2 * rank) as f64;
    let mut dist = vec![0.0; steps + 2];
    dist[0] = 1.0;
    let mut out = Vec::with_capacity(steps);
    for n in 1..=steps {
        let mut next = vec![0.0; steps + 2];
        next[1] += dist[0];
        for k in 1..n {
            next[k + 1] += dist[k] * up;
            next[k - 1] += dist[k] * (1.0 - up);
        }
        dist = next;
        out.push(dist.iter().enumerate().map(|(k, p)| k as f64 * p).sum());
    }
    out
}

/// Exact `E|S_n| / n` for the simple symmetric walk on the integers.
pub fn integer_walk_expected_ratio(n: usize) -> f64 {
    // E|S_n| = n * C(n - 1, floor((n - 1) / 2)) / 2^(n - 1), in log space.
    let m = n - 1;
    let k = m / 2;
    let ln_binom: f64 = (1..=k).map(|i| ((m - k + i) as f64).ln() - (i as f64).ln()).sum();
    (ln_binom - m as f64 * std::f64::consts::LN_2).exp()
}

const DRIFT_STEPS: usize = 10_000;
const DRIFT_TRIALS: usize = 200;
/// Trials for the integer-walk comparison at a single time.
const INTEGER_TRIALS: usize = 2_000;

fn positive_drift(log: &mut Log, seed: u64) -> Result<()> {
    let est = estimate_drift(&FreeGroupWalk { rank: 2 }, DRIFT_STEPS, DRIFT_TRIALS, seed)?;
    let exact = free_group_expected_lengths(2, DRIFT_STEPS);
    let tail = DRIFT_STEPS / 2..DRIFT_STEPS;
    let exact_slope = tail.clone().map(|i| exact[i] / (i + 1) as f64).sum::<f64>() / tail.len() as f64;
    log.check(
        (0.48..=0.52).contains(&est.slope),
        format!("F2 drift {:.4} +- {:.4} over {DRIFT_TRIALS} trials of {DRIFT_STEPS} steps", est.slope, est.ci_halfwidth),
    );
    log.check((exact_slope - 0.5).abs() < 0.01, format!("birth-death chain tail slope {exact_slope:.6}"));
    Ok(())
}

fn zero_drift(log: &mut Log, corpus: &Corpus, seed: u64) -> Result<()> {
    for inst in &corpus.induction {
        let fga = inst.build()?;
        let walk = FiniteGroupWalk {
            group: &fga.group,
            step_set: &fga.gens_lattice,
            action: &fga.action,
            space: fga.space.space(),
            x0: fga.basepoint,
        };
        let est = estimate_drift(&walk, DRIFT_STEPS, DRIFT_TRIALS, seed)?;
        log.check(est.slope <= 0.02, format!("{} lattice walk drift {:.6}", inst.name, est.slope));
    }
    let est = estimate_drift(&IntegerWalk, DRIFT_STEPS, INTEGER_TRIALS, seed)?;
    let empirical = est.means[DRIFT_STEPS - 1] / DRIFT_STEPS as f64;
    let exact = integer_walk_expected_ratio(DRIFT_STEPS);
    log.check(
        (empirical - exact).abs() <= 0.1 * exact,
        format!("Z walk E|S_n|/n at n = {DRIFT_STEPS}: {empirical:.6} vs exact {exact:.6} ({INTEGER_TRIALS} trials)"),
    );
    Ok(())
}

const KAC_STEPS: usize = 100_000;

fn return_times(log: &mut Log, corpus: &Corpus, seed: u64) -> Result<()> {
    for inst in &corpus.kac {
        let hs = inst.build()?;
        let cfg = WalkConfig {
            basepoint: hs.basepoint,
            steps: KAC_STEPS,
            trials: 1,
            seed,
        };
        let r = kac_check(&hs, &cfg)?;
        let mut ok = r.relative_error <= 0.05;
        if hs.lattice.len() == 1 && hs.graph.vertex_count() > 0 {
            let n = hs.graph.vertex_count() as f64;
            ok &= (r.predicted - n).abs() < 1e-9;
        }
        log.check(
            ok,
            format!(
                "{}: {} classes, period {}, predicted {:.4}, empirical {:.4} over {} returns",
                inst.name, r.classes, r.period, r.predicted, r.empirical, r.returns
            ),
        );
    }
    log.check(
        corpus.kac.iter().any(|k| k.group.lattice.len() > 1),
        "corpus has an instance with nontrivial lattice".into(),
    );
    Ok(())
}

fn loxodromic(log: &mut Log, corpus: &Corpus) -> Result<()> {
    let r = translation_length(&LineShift { shift: 1, half_width: 1_000 }, 100, DEFAULT_LOXODROMIC_THRESHOLD)?;
    log.check(r.estimate == 1.0 && r.loxodromic, format!("unit shift: estimate {}", r.estimate));
    let mut elements = 0;
    let mut bad = Vec::new();
    for inst in &corpus.kac {
        let hs = inst.build()?;
        let space = hs.graph.metric()?;
        for g in 0..hs.group.order() {
            for x in 0..space.len() {
                let p = OrbitPower { group: &hs.group, action: &hs.action, space: &space, element: g, point: x };
                let n_max = 2 * hs.group.element_order(g) as u64;
                let t = translation_length(&p, n_max, DEFAULT_LOXODROMIC_THRESHOLD)?;
                elements += 1;
                if t.estimate != 0.0 || t.loxodromic {
                    bad.push((inst.name.clone(), g, x));
                }
            }
        }
    }
    log.check(bad.is_empty(), format!("{elements} finite-order (element, point) pairs elliptic {:?}", bad.first()));
    let n = 8;
    let group = crate::induction::FiniteGroup::cyclic(n);
    let all: Vec<usize> = (0..n).collect();
    let wm = group.word_metric(&[1, n - 1], &all)?;
    let space = Graph::cycle(n)?.metric()?;
    let table: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|x| (x + a) % n).collect()).collect();
    let q = quasi_action_check(&table, &group, &wm, &space, &QuasiSamples::exhaustive(n, n))?;
    log.check((q.k, q.c) == (1.0, 0.0), format!("rotation of C8: (K, C) = ({}, {})", q.k, q.c));
    Ok(())
}

/// `G(n, p)` with `n` and `p` drawn from `rng`.
pub fn random_graph(rng: &mut impl Rng, max_n: usize) -> Graph {
    let n = rng.gen_range(1..=max_n);
    let p: f64 = rng.gen_range(0.1..0.9);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, &edges).expect("generated graph is simple")
}

fn sl_dimension(log: &mut Log, seed: u64) -> Result<()> {
    for d in 1..=6 {
        let r = compute_dsl(&Graph::complete(d), DslMode::SameStar)?;
        log.check(r.dsl == d, format!("K{d}: d_SL = {}", r.dsl));
    }
    for (name, g) in [("P3", Graph::path(3)), ("C4", Graph::cycle(4)?)] {
        let r = compute_dsl(&g, DslMode::SameStar)?;
        log.check(r.dsl == 1, format!("{name}: d_SL = {}", r.dsl));
    }
    let mut rng = trial_rng(seed, 11);
    let mut failures = Vec::new();
    for i in 0..100 {
        let x = random_graph(&mut rng, 15);
        let n = x.vertex_count();
        let pm = prec_max(&x)?;
        let full = compute_dsl(&x, DslMode::Prec(&pm.relation))?.dsl;
        let same = compute_dsl(&x, DslMode::SameStar)?.dsl;
        let keep: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.6)).collect();
        let y = x.induced_subgraph(&keep)?;
        let restricted = pm.relation.restrict(&keep)?;
        let admissible = restricted.admissibility_violation(&y)?.is_none();
        let sub = compute_dsl(&y, DslMode::Prec(&restricted))?.dsl;
        if !(admissible && sub <= full && same <= full) {
            failures.push(i);
        }
    }
    log.check(
        failures.is_empty(),
        format!("100 random graphs: induced-subgraph monotonicity and same-star <= prec, failures {failures:?}"),
    );
    Ok(())
}

/// The seeded criteria, rerun and compared as serialized JSON.
fn determinism(log: &mut Log, corpus: &Corpus, seed: u64) -> Result<()> {
    for id in [7, 8, 9, 11] {
        let a = serde_json::to_string(&run_criterion(id, corpus, seed))?;
        let b = serde_json::to_string(&run_criterion(id, corpus, seed))?;
        log.check(a == b, format!("criterion {id} reproduces byte for byte"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_oracle_small_sizes() {
        assert_eq!(majority_closure_size(1), 1);
        assert_eq!(majority_closure_size(2), 2);
        assert_eq!(majority_closure_size(3), 4);
    }

    #[test]
    fn integer_ratio_small_cases() {
        // E|S_1| = 1, E|S_2| = 1, E|S_3| = 3/2, E|S_4| = 3/2.
        assert!((integer_walk_expected_ratio(1) - 1.0).abs() < 1e-12);
        assert!((integer_walk_expected_ratio(2) - 0.5).abs() < 1e-12);
        assert!((integer_walk_expected_ratio(3) - 0.5).abs() < 1e-12);
        assert!((integer_walk_expected_ratio(4) - 0.375).abs() < 1e-12);
    }

    #[test]
    fn birth_death_first_steps() {
        let e = free_group_expected_lengths(2, 3);
        // |w_1| = 1; |w_2| = 2 w.p. 3/4 else 0; |w_3| = 3 w.p. 9/16, 1 otherwise.
        assert_eq!(e[0], 1.0);
        assert!((e[1] - 1.5).abs() < 1e-12);
        assert!((e[2] - (27.0 / 16.0 + 7.0 / 16.0)).abs() < 1e-12);
    }
}
