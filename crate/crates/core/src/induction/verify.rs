use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::induced::{apply_induced_action, d_y, mu_y, InducedSpace};
use super::transversal::{check_cocycle_identity, CocycleReport};
use super::FiniteGroupAction;
use crate::coarse::{verify_c1, C1Mode};
use crate::metric::approx_eq;
use crate::EPS;

/// Budgets for the checks that scale badly with `|Y|`.
#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    /// Largest `|Y|^6` for which (C1) runs over every sextuple.
    pub c1_exhaustive_limit: u64,
    /// Largest `|G| |Y|^3` for which quasi-preservation runs over every triple.
    pub triple_exhaustive_limit: u64,
    pub samples: u64,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            c1_exhaustive_limit: 20_000_000,
            triple_exhaustive_limit: 20_000_000,
            samples: 200_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub passed: bool,
    pub checked: u64,
    pub exhaustive: bool,
    /// Offending indices into the induced space or group, when failed.
    pub witness: Option<Vec<usize>>,
}

impl Check {
    fn new(exhaustive: bool) -> Self {
        Self {
            passed: true,
            checked: 0,
            exhaustive,
            witness: None,
        }
    }

    fn fail(&mut self, witness: Vec<usize>) {
        if self.passed {
            self.passed = false;
            self.witness = Some(witness);
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InducedReport {
    pub transversal: Vec<usize>,
    pub induced_points: usize,
    pub sampled: bool,
    pub cocycle: CocycleReport,
    pub action_law: Check,
    pub isometry: Check,
    /// (C1) for `mu_Y` with the constants of `mu_X`.
    pub c1: Check,
    pub k: f64,
    pub h0: f64,
    pub c_x: f64,
    pub c_x_witness: Option<[usize; 4]>,
    pub c_y: f64,
    pub c_y_witness: Option<[usize; 4]>,
    pub c_y_exhaustive: bool,
    pub alpha: f64,
    pub orbit_bound: Check,
    pub integrability: Vec<(usize, f64)>,
    pub passed: bool,
}

/// Checks the induced action against every property the construction
/// guarantees, exhaustively where the budgets allow.
pub fn verify_induced_action(
    fga: &mut FiniteGroupAction,
    ind: &InducedSpace,
    config: VerifyConfig,
) -> InducedReport {
    let (k, h0) = match fga.space.k {
        Some(k) => (k, fga.space.h0),
        None => {
            let r = verify_c1(&mut fga.space, C1Mode::Exhaustive);
            (r.k, r.h0)
        }
    };
    let fga: &FiniteGroupAction = fga;
    let grp = &fga.group;
    let order = grp.order();
    let y = &ind.functions;
    let ny = y.len();

    // g . y_i, by index when Y is enumerated in full.
    let moved: Vec<Vec<Vec<usize>>> = (0..order)
        .into_par_iter()
        .map(|g| y.iter().map(|a| apply_induced_action(fga, g, a)).collect())
        .collect();
    let table: Option<Vec<Vec<usize>>> = ind.full.then(|| {
        moved
            .iter()
            .map(|row| row.iter().map(|b| ind.index_of(b).expect("full")).collect())
            .collect()
    });

    let mut action_law = Check::new(true);
    'law: for g in 0..order {
        for h in 0..order {
            let gh = grp.mul(g, h);
            for i in 0..ny {
                action_law.checked += 1;
                let lhs = match &table {
                    Some(t) => t[g][t[h][i]] == t[gh][i],
                    None => apply_induced_action(fga, g, &moved[h][i]) == moved[gh][i],
                };
                if !lhs {
                    action_law.fail(vec![g, h, i]);
                    break 'law;
                }
            }
        }
    }

    let mut isometry = Check::new(true);
    'iso: for g in 1..order {
        for i in 0..ny {
            for j in i + 1..ny {
                isometry.checked += 1;
                if !approx_eq(d_y(fga, &moved[g][i], &moved[g][j]), d_y(fga, &y[i], &y[j])) {
                    isometry.fail(vec![g, i, j]);
                    break 'iso;
                }
            }
        }
    }

    let c1 = c1_check(fga, ind, k, h0, config);

    let (c_x, c_x_witness) = fga.median_quasi_preservation();
    let triples = order as u64 * (ny as u64).pow(3);
    let c_y_exhaustive = triples <= config.triple_exhaustive_limit;
    let (c_y, c_y_witness) = if c_y_exhaustive {
        (0..order)
            .into_par_iter()
            .map(|g| {
                let mut best = (0.0, None);
                for a in 0..ny {
                    for b in 0..ny {
                        for c in 0..ny {
                            let e = quasi_defect(fga, &moved[g], y, g, [a, b, c]);
                            if e > best.0 + EPS {
                                best = (e, Some([g, a, b, c]));
                            }
                        }
                    }
                }
                best
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold((0.0, None), |acc, x| if x.0 > acc.0 + EPS { x } else { acc })
    } else {
        let mut rng = crate::rng::trial_rng(config.seed, 1);
        let mut best = (0.0, None);
        for _ in 0..config.samples {
            let g = rng.gen_range(0..order);
            let t = [rng.gen_range(0..ny), rng.gen_range(0..ny), rng.gen_range(0..ny)];
            let e = quasi_defect(fga, &moved[g], y, g, t);
            if e > best.0 + EPS {
                best = (e, Some([g, t[0], t[1], t[2]]));
            }
        }
        best
    };

    let y0 = ind.y0;
    let alpha = fga
        .gens_group
        .iter()
        .map(|&b| d_y(fga, &moved[b][y0], &y[y0]))
        .fold(0.0, f64::max);
    let mut orbit_bound = Check::new(true);
    for g in 0..order {
        for h in g + 1..order {
            orbit_bound.checked += 1;
            let dg = fga.group_metric.dist(grp, g, h).expect("generators span G");
            if d_y(fga, &moved[g][y0], &moved[h][y0]) > alpha * f64::from(dg) + EPS {
                orbit_bound.fail(vec![g, h]);
            }
        }
    }

    let cocycle = check_cocycle_identity(grp, &fga.transversal);
    let passed = cocycle.passed
        && action_law.passed
        && isometry.passed
        && c1.passed
        && c_y <= c_x + EPS
        && orbit_bound.passed;
    InducedReport {
        transversal: fga.transversal.reps.clone(),
        induced_points: ny,
        sampled: !ind.full,
        cocycle,
        action_law,
        isometry,
        c1,
        k,
        h0,
        c_x,
        c_x_witness,
        c_y,
        c_y_witness,
        c_y_exhaustive,
        alpha,
        orbit_bound,
        integrability: ind.integrability.clone(),
        passed,
    }
}

fn quasi_defect(
    fga: &FiniteGroupAction,
    moved_g: &[Vec<usize>],
    y: &[Vec<usize>],
    g: usize,
    [a, b, c]: [usize; 3],
) -> f64 {
    let lhs = mu_y(fga, &moved_g[a], &moved_g[b], &moved_g[c]);
    let rhs = apply_induced_action(fga, g, &mu_y(fga, &y[a], &y[b], &y[c]));
    d_y(fga, &lhs, &rhs)
}

fn c1_check(
    fga: &FiniteGroupAction,
    ind: &InducedSpace,
    k: f64,
    h0: f64,
    config: VerifyConfig,
) -> Check {
    let y = &ind.functions;
    let ny = y.len();
    let holds = |s: [usize; 6]| {
        let lhs = d_y(fga, &mu_y(fga, &y[s[0]], &y[s[1]], &y[s[2]]), &mu_y(fga, &y[s[3]], &y[s[4]], &y[s[5]]));
        let spread = d_y(fga, &y[s[0]], &y[s[3]]) + d_y(fga, &y[s[1]], &y[s[4]]) + d_y(fga, &y[s[2]], &y[s[5]]);
        lhs <= k * spread + h0 + EPS
    };
    let total = (ny as u64).saturating_pow(6);
    if total <= config.c1_exhaustive_limit {
        let medians: Vec<Vec<usize>> = (0..ny * ny * ny)
            .map(|t| mu_y(fga, &y[t / (ny * ny)], &y[(t / ny) % ny], &y[t % ny]))
            .collect();
        let dist: Vec<f64> = (0..ny * ny).map(|t| d_y(fga, &y[t / ny], &y[t % ny])).collect();
        let failure = (0..ny * ny * ny).into_par_iter().find_first(|&t1| {
            let (a, b, c) = (t1 / (ny * ny), (t1 / ny) % ny, t1 % ny);
            (0..ny * ny * ny).any(|t2| {
                let (a2, b2, c2) = (t2 / (ny * ny), (t2 / ny) % ny, t2 % ny);
                let lhs = d_y(fga, &medians[t1], &medians[t2]);
                let spread = dist[a * ny + a2] + dist[b * ny + b2] + dist[c * ny + c2];
                lhs > k * spread + h0 + EPS
            })
        });
        let mut check = Check::new(true);
        check.checked = total;
        if let Some(t1) = failure {
            let (a, b, c) = (t1 / (ny * ny), (t1 / ny) % ny, t1 % ny);
            check.fail(vec![a, b, c]);
        }
        check
    } else {
        let mut rng = crate::rng::trial_rng(config.seed, 2);
        let mut check = Check::new(false);
        for _ in 0..config.samples {
            let s: [usize; 6] = std::array::from_fn(|_| rng.gen_range(0..ny));
            check.checked += 1;
            if !holds(s) {
                check.fail(s.to_vec());
                break;
            }
        }
        check
    }
}
