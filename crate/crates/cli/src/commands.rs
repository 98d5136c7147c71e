use std::path::Path;

use lattice_median::acceptance::{run_all, CriterionResult};
use lattice_median::coarse::{
    measure_c2, verify_c1, C1Mode, CoarseMedianStructure, CoarseReport, Witness,
};
use lattice_median::corpus::Corpus;
use lattice_median::induction::{
    induce_space, verify_induced_action, ActionFile, FiniteGroupAction, GroupFile, InduceMode,
    VerifyConfig, SAMPLED_FUNCTIONS,
};
use lattice_median::median::{
    find_wall, free_median_algebra, rank, verify_median_axioms, verify_median_axioms_sampled,
    AlgebraFile, FiniteMedianAlgebra,
};
use lattice_median::metric::{estimate_delta_with, is_median_graph, DeltaConfig, FiniteMetricSpace, MetricFile};
use lattice_median::raag::{compute_dsl, prec_max, DslMode, Relation};
use lattice_median::rng::trial_rng;
use lattice_median::walks::{
    discretized_walk, estimate_drift, kac_check, quasi_action_check, translation_length,
    DiscretizedDrift, FiniteGroupWalk, FreeGroupWalk, FreeWordPower, GraphWalk, IntegerWalk,
    KacSummary, LineShift, OrbitPower, QuasiSamples, WalkConfig, WalkReport,
};
use lattice_median::Error;
use rand::seq::SliceRandom;
use serde::Serialize;

use crate::inputs::{self, DriftConfig, QuasiInput, TranslationConfig};
use crate::{Command, Common, DslModeArg, Envelope, Outcome};

pub enum Failure {
    /// Report text for an exhausted budget.
    Budget(String),
    Usage(String),
}

const KAC_TOLERANCE: f64 = 0.05;

type Run = Result<Outcome, Failure>;

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

fn finish<T: Serialize>(command: &'static str, seed: u64, violated: Option<String>, report: T) -> Run {
    let passed = violated.is_none();
    Ok(Outcome {
        text: to_json(&Envelope {
            command,
            status: if passed { "pass" } else { "fail" },
            violated,
            seed,
            report,
        }),
        passed,
    })
}

fn failure(command: &'static str, seed: u64) -> impl Fn(Error) -> Failure {
    move |e| match e {
        Error::BudgetExceeded { what, limit, partial } => {
            #[derive(Serialize)]
            struct Partial {
                limit: usize,
                partial: usize,
            }
            Failure::Budget(to_json(&Envelope {
                command,
                status: "budget_exceeded",
                violated: Some(format!("budget: {what}")),
                seed,
                report: Partial { limit, partial },
            }))
        }
        other => Failure::Usage(other.to_string()),
    }
}

fn algebra(path: &Path) -> lattice_median::Result<FiniteMedianAlgebra> {
    inputs::load::<AlgebraFile>(path)?.into_algebra()
}

pub fn run(command: Command, common: &Common) -> Run {
    let seed = common.seed;
    match command {
        Command::VerifyMedian { algebra: path, samples } => {
            let fail = failure("verify-median", seed);
            let alg = algebra(&path).map_err(&fail)?;
            let r = match samples {
                Some(s) => verify_median_axioms_sampled(&alg, s, seed),
                None => verify_median_axioms(&alg),
            };
            let violated = r
                .first_violation()
                .map(|v| format!("median axiom {:?} at {:?}", v.axiom, v.tuple));
            finish("verify-median", seed, violated, r)
        }
        Command::FreeMedian { n, cap } => {
            let fail = failure("free-median", seed);
            let free = free_median_algebra(n, cap).map_err(&fail)?;
            // The algebra file itself is the report, so that it can be read back.
            Ok(Outcome {
                text: to_json(&AlgebraFile::from(&free.algebra)),
                passed: true,
            })
        }
        Command::Interval { algebra: path, a, b } => {
            let fail = failure("interval", seed);
            let alg = algebra(&path).map_err(&fail)?;
            let interval = alg.algebraic_interval(a, b).map_err(&fail)?;
            #[derive(Serialize)]
            struct R {
                a: usize,
                b: usize,
                interval: Vec<usize>,
                convexity_violation: Option<lattice_median::median::ConvexityViolation>,
            }
            let convexity_violation = alg.is_convex(&interval).map_err(&fail)?;
            let violated = convexity_violation.map(|v| format!("interval is convex: {v:?}"));
            finish("interval", seed, violated, R { a, b, interval, convexity_violation })
        }
        Command::Wall { algebra: path, x, y } => {
            let fail = failure("wall", seed);
            let alg = algebra(&path).map_err(&fail)?;
            match find_wall(&alg, x, y) {
                Ok(h) => finish("wall", seed, None, h),
                Err(Error::InternalContradiction(msg)) => {
                    finish("wall", seed, Some(format!("walls separate points: {msg}")), ())
                }
                Err(e) => Err(fail(e)),
            }
        }
        Command::Rank { algebra: path, cap } => {
            let alg = algebra(&path).map_err(failure("rank", seed))?;
            finish("rank", seed, None, rank(&alg, cap))
        }
        Command::MedianGraph { graph } => {
            let fail = failure("median-graph", seed);
            let g = inputs::graph(&graph).map_err(&fail)?;
            let check = is_median_graph(&g).map_err(&fail)?;
            #[derive(Serialize)]
            struct R {
                median: bool,
                witness: Option<lattice_median::metric::MedianWitness>,
            }
            let r = R {
                median: check.is_median(),
                witness: check.witness().cloned(),
            };
            // A non-median graph is an answer, not a failure.
            finish("median-graph", seed, None, r)
        }
        Command::Delta { graph, metric, samples } => {
            let fail = failure("delta", seed);
            let space = match (graph, metric) {
                (Some(g), _) => inputs::graph(&g).and_then(|g| g.metric()),
                (None, Some(m)) => inputs::load::<MetricFile>(&m).and_then(FiniteMetricSpace::from_file),
                (None, None) => unreachable!("clap requires one input"),
            }
            .map_err(&fail)?;
            let cfg = DeltaConfig { samples, seed, ..DeltaConfig::default() };
            finish("delta", seed, None, estimate_delta_with(&space, cfg))
        }
        Command::CoarseCheck { graph, samples, p_max, subsets, previous } => {
            coarse_check(&graph, samples, p_max, subsets, previous.as_deref(), seed)
        }
        Command::Induce { files, sampled, functions } => {
            let fail = failure("induce", seed);
            let fga = induction(&files).map_err(&fail)?;
            let mode = induce_mode(sampled, seed);
            let ind = induce_space(&fga, mode).map_err(&fail)?;
            #[derive(Serialize)]
            struct R {
                transversal: Vec<usize>,
                points: usize,
                full: bool,
                y0: Vec<usize>,
                integrability: Vec<(usize, f64)>,
                functions: Option<Vec<Vec<usize>>>,
            }
            let r = R {
                transversal: fga.transversal.reps.clone(),
                points: ind.len(),
                full: ind.full,
                y0: ind.functions[ind.y0].clone(),
                integrability: ind.integrability.clone(),
                functions: functions.then(|| ind.functions.clone()),
            };
            finish("induce", seed, None, r)
        }
        Command::VerifyInduced { files, sampled } => {
            let fail = failure("verify-induced", seed);
            let mut fga = induction(&files).map_err(&fail)?;
            let ind = induce_space(&fga, induce_mode(sampled, seed)).map_err(&fail)?;
            let cfg = VerifyConfig { seed, ..VerifyConfig::default() };
            let r = verify_induced_action(&mut fga, &ind, cfg);
            let violated = if !r.cocycle.passed {
                Some("cocycle identity".to_string())
            } else if !r.action_law.passed {
                Some(format!("action law at {:?}", r.action_law.witness))
            } else if !r.isometry.passed {
                Some(format!("isometry at {:?}", r.isometry.witness))
            } else if !r.c1.passed {
                Some(format!("(C1) with inherited constants at {:?}", r.c1.witness))
            } else if r.c_y > r.c_x + lattice_median::EPS {
                Some(format!("C_Y <= C_X at {:?}", r.c_y_witness))
            } else if !r.orbit_bound.passed {
                Some(format!("orbit map is alpha-Lipschitz at {:?}", r.orbit_bound.witness))
            } else {
                None
            };
            finish("verify-induced", seed, violated, r)
        }
        Command::Walk { files, steps, trials } => {
            let fail = failure("walk", seed);
            let hs = inputs::homogeneous(&files.group, &files.graph, &files.action).map_err(&fail)?;
            let cfg = WalkConfig { basepoint: hs.basepoint, steps, trials, seed };
            let space = hs.graph.metric().map_err(&fail)?;
            let walk = GraphWalk { graph: &hs.graph, space: &space, basepoint: hs.basepoint };
            let drift = estimate_drift(&walk, steps, trials, seed).map_err(&fail)?;
            let kac = kac_check(&hs, &cfg).map_err(&fail)?;
            let report = WalkReport {
                config: cfg,
                drift: drift.slope,
                ci: drift.ci_halfwidth,
                kac: KacSummary { empirical: kac.empirical, predicted: kac.predicted },
                seed,
            };
            Ok(Outcome { text: to_json(&report), passed: true })
        }
        Command::Discretize { files, steps, trial, strict } => {
            let fail = failure("discretize", seed);
            let hs = inputs::homogeneous(&files.group, &files.graph, &files.action).map_err(&fail)?;
            let cfg = WalkConfig { basepoint: hs.basepoint, steps, trials: 1, seed };
            let w = discretized_walk(&hs, &cfg, trial, None, strict).map_err(&fail)?;
            let violated = w.incomplete.then(|| "a return to the orbit within the step budget".to_string());
            finish("discretize", seed, violated, w)
        }
        Command::Drift { config, steps, trials, report } => drift(&config, steps, trials, report.as_deref(), seed),
        Command::Kac { files, steps, trials } => {
            let fail = failure("kac", seed);
            let hs = inputs::homogeneous(&files.group, &files.graph, &files.action).map_err(&fail)?;
            let cfg = WalkConfig { basepoint: hs.basepoint, steps, trials, seed };
            let r = kac_check(&hs, &cfg).map_err(&fail)?;
            let violated = (r.relative_error > KAC_TOLERANCE)
                .then(|| format!("E[T] within {KAC_TOLERANCE} of 1/stationary mass"));
            finish("kac", seed, violated, r)
        }
        Command::Translation { config, n_max, threshold } => translation(&config, n_max, threshold, seed),
        Command::QuasiCheck { input, samples } => quasi(&input, samples, seed),
        Command::RaagDsl { graph, mode, order } => {
            let fail = failure("raag-dsl", seed);
            let g = inputs::graph(&graph).map_err(&fail)?;
            let relation = match order {
                Some(path) => inputs::load::<Relation>(&path).map_err(&fail)?,
                None => prec_max(&g).map_err(&fail)?.relation,
            };
            let (mode_name, dsl_mode) = match mode {
                DslModeArg::SameStar => ("same-star", DslMode::SameStar),
                DslModeArg::Prec => ("prec", DslMode::Prec(&relation)),
            };
            let r = compute_dsl(&g, dsl_mode).map_err(&fail)?;
            #[derive(Serialize)]
            struct R {
                graph: String,
                mode: &'static str,
                dsl: usize,
                witness_clique: Vec<usize>,
            }
            let id = graph.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
            finish("raag-dsl", seed, None, R { graph: id, mode: mode_name, dsl: r.dsl, witness_clique: r.witness_clique })
        }
        Command::CheckAll { corpus } => {
            let corpus = match corpus {
                Some(dir) => Corpus::load(&dir).map_err(failure("check-all", seed))?,
                None => Corpus::builtin(),
            };
            let results: Vec<CriterionResult> = run_all(&corpus, seed);
            let failed: Vec<String> = results
                .iter()
                .filter(|r| !r.passed)
                .map(|r| format!("criterion {} ({})", r.id, r.name))
                .collect();
            let violated = (!failed.is_empty()).then(|| failed.join(", "));
            finish("check-all", seed, violated, results)
        }
    }
}

fn induce_mode(sampled: bool, seed: u64) -> InduceMode {
    if sampled {
        InduceMode::Auto { samples: SAMPLED_FUNCTIONS, seed }
    } else {
        InduceMode::Full
    }
}

fn induction(files: &crate::InductionFiles) -> lattice_median::Result<FiniteGroupAction> {
    let group: GroupFile = inputs::load(&files.group)?;
    let action: ActionFile = inputs::load(&files.action)?;
    FiniteGroupAction::from_files(&group, inputs::graph(&files.space)?, &action)
}

fn coarse_check(
    graph: &Path,
    samples: Option<u64>,
    p_max: usize,
    subsets: usize,
    previous: Option<&Path>,
    seed: u64,
) -> Run {
    let fail = failure("coarse-check", seed);
    let g = inputs::graph(graph).map_err(&fail)?;
    let id = graph.file_stem().and_then(|s| s.to_str()).unwrap_or("graph").to_string();
    let mut cms = CoarseMedianStructure::new(id, g).map_err(&fail)?;
    let mode = match samples {
        Some(samples) => C1Mode::Sampled { samples, seed },
        None => C1Mode::Exhaustive,
    };
    let c1 = verify_c1(&mut cms, mode);
    let mut witnesses = Vec::new();
    if let Some(w) = c1.witness {
        witnesses.push(Witness { kind: "c1".into(), points: w.to_vec(), value: c1.k });
    }
    let n = cms.len();
    let points: Vec<usize> = (0..n).collect();
    let mut rng = trial_rng(seed, 0);
    let mut out_of_bound = None;
    for p in 1..=p_max.min(n) {
        let mut worst: Option<(f64, Vec<usize>)> = None;
        for _ in 0..subsets {
            let s: Vec<usize> = points.choose_multiple(&mut rng, p).copied().collect();
            let r = measure_c2(&cms, &s).map_err(&fail)?;
            cms.record_h(p, r.h);
            if !r.within_bound && out_of_bound.is_none() {
                out_of_bound = Some(format!("distortion {} exceeds {} on {s:?}", r.distortion, r.distortion_bound));
            }
            if worst.as_ref().is_none_or(|w| r.h > w.0) {
                worst = Some((r.h, s));
            }
        }
        if let Some((h, s)) = worst.filter(|w| w.0 > 0.0) {
            witnesses.push(Witness { kind: format!("c2_p{p}"), points: s, value: h });
        }
    }
    let mut report: CoarseReport = cms.report(witnesses);
    if let Some(path) = previous {
        // Either a bare report or a whole envelope from an earlier run.
        let mut value: serde_json::Value = inputs::load(path).map_err(&fail)?;
        if let Some(inner) = value.get_mut("report") {
            value = inner.take();
        }
        let prev: CoarseReport = serde_json::from_value(value).map_err(|e| Failure::Usage(e.to_string()))?;
        report.merge_previous(&prev);
    }
    finish("coarse-check", seed, out_of_bound.map(|m| format!("approximation distortion bound: {m}")), report)
}

fn drift(config: &Path, steps: usize, trials: usize, report: Option<&Path>, seed: u64) -> Run {
    let fail = failure("drift", seed);
    let cfg: DriftConfig = inputs::load(config).map_err(&fail)?;
    let est = match cfg {
        DriftConfig::FreeGroup { rank } => {
            if rank == 0 {
                return Err(Failure::Usage("rank must be positive".into()));
            }
            estimate_drift(&FreeGroupWalk { rank }, steps, trials, seed)
        }
        DriftConfig::Integer => estimate_drift(&IntegerWalk, steps, trials, seed),
        DriftConfig::Graph { graph, basepoint } => {
            let g = inputs::graph(&inputs::relative(config, &graph)).map_err(&fail)?;
            WalkConfig { basepoint, steps, trials, seed }.validate(&g).map_err(&fail)?;
            let space = g.metric().map_err(&fail)?;
            estimate_drift(&GraphWalk { graph: &g, space: &space, basepoint }, steps, trials, seed)
        }
        DriftConfig::Lattice { instance } => {
            let dir = inputs::relative(config, &instance);
            let fga = lattice_median::corpus::InductionInstance::load(&dir)
                .and_then(|i| i.build())
                .map_err(&fail)?;
            let walk = FiniteGroupWalk {
                group: &fga.group,
                step_set: &fga.gens_lattice,
                action: &fga.action,
                space: fga.space.space(),
                x0: fga.basepoint,
            };
            if fga.gens_lattice.is_empty() {
                return Err(Failure::Usage("the lattice needs generators to walk on".into()));
            }
            estimate_drift(&walk, steps, trials, seed)
        }
        DriftConfig::Discretized { homogeneous, space, action, budget_factor } => {
            let dir = inputs::relative(config, &homogeneous);
            let hs = lattice_median::corpus::KacInstance::load(&dir).and_then(|k| k.build()).map_err(&fail)?;
            let x = inputs::graph(&inputs::relative(config, &space)).and_then(|g| g.metric()).map_err(&fail)?;
            let group: GroupFile = inputs::load(&dir.join("group.json")).map_err(&fail)?;
            let act_file: ActionFile = inputs::load(&inputs::relative(config, &action)).map_err(&fail)?;
            let act = inputs::lattice_action(&hs, &x, &act_file, &group.gens_lattice).map_err(&fail)?;
            let walk = DiscretizedDrift { hs: &hs, action: &act, space: &x, x0: act_file.basepoint, budget_factor };
            estimate_drift(&walk, steps, trials, seed)
        }
    }
    .map_err(&fail)?;
    if let Some(path) = report {
        #[derive(Serialize)]
        struct Summary {
            drift: f64,
            ci: f64,
            steps: usize,
            trials: usize,
            seed: u64,
        }
        let summary = Summary { drift: est.slope, ci: est.ci_halfwidth, steps: est.steps, trials, seed };
        std::fs::write(path, to_json(&summary)).map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let csv = est.to_csv().map_err(&fail)?;
    Ok(Outcome { text: csv, passed: true })
}

fn translation(config: &Path, n_max: u64, threshold: f64, seed: u64) -> Run {
    let fail = failure("translation", seed);
    let cfg: TranslationConfig = inputs::load(config).map_err(&fail)?;
    let r = match cfg {
        TranslationConfig::Line { shift, half_width } => {
            translation_length(&LineShift { shift, half_width }, n_max, threshold)
        }
        TranslationConfig::FreeWord { word, depth_cap } => {
            translation_length(&FreeWordPower { word, depth_cap }, n_max, threshold)
        }
        TranslationConfig::Group { instance, element, point } => {
            let dir = inputs::relative(config, &instance);
            let hs = lattice_median::corpus::KacInstance::load(&dir).and_then(|k| k.build()).map_err(&fail)?;
            hs.group.check_element(element).map_err(&fail)?;
            let space = hs.graph.metric().map_err(&fail)?;
            space.check_point(point).map_err(&fail)?;
            let p = OrbitPower { group: &hs.group, action: &hs.action, space: &space, element, point };
            translation_length(&p, n_max, threshold)
        }
    }
    .map_err(&fail)?;
    finish("translation", seed, None, r)
}

fn quasi(input: &Path, samples: Option<usize>, seed: u64) -> Run {
    let fail = failure("quasi-check", seed);
    let q: QuasiInput = inputs::load(input).map_err(&fail)?;
    let group = inputs::group_from_rows(&q.mul).map_err(&fail)?;
    let space = q.space().map_err(&fail)?;
    let all: Vec<usize> = (0..group.order()).collect();
    let wm = group.word_metric(&q.gens, &all).map_err(&fail)?;
    let s = match (q.triples.clone(), q.pairs.clone(), samples) {
        (Some(triples), Some(pairs), _) => QuasiSamples { triples, pairs },
        (None, None, Some(count)) => QuasiSamples::sampled(group.order(), space.len(), count, seed),
        (None, None, None) => QuasiSamples::exhaustive(group.order(), space.len()),
        _ => return Err(Failure::Usage("give both \"triples\" and \"pairs\" or neither".into())),
    };
    let r = quasi_action_check(&q.action, &group, &wm, &space, &s).map_err(&fail)?;
    let violated = r.unbounded_growth.then(|| "bounded quasi-action constants".to_string());
    finish("quasi-check", seed, violated, r)
}
