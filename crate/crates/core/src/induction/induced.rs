use rand::Rng;
use serde::Serialize;

use super::FiniteGroupAction;
use crate::error::{Error, Result};

/// Largest `|X|^|U|` enumerated in full.
pub const FULL_ENUMERATION_LIMIT: usize = 1_000_000;
/// Functions drawn when the induced space is too large to enumerate.
pub const SAMPLED_FUNCTIONS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InduceMode {
    /// Enumerate every function or fail.
    Full,
    /// Enumerate when within the limit, otherwise sample `samples` functions.
    Auto { samples: usize, seed: u64 },
}

/// Functions `U -> X`, each stored as the image of every transversal slot.
#[derive(Debug, Clone, Serialize)]
pub struct InducedSpace {
    pub slots: usize,
    pub space_points: usize,
    pub functions: Vec<Vec<usize>>,
    /// True when `functions` is all of `X^U` in lexicographic order.
    pub full: bool,
    /// Index of the constant function at the basepoint.
    pub y0: usize,
    /// `(g, (1/|U|) sum_u d_Γ(chi(g^-1 u), e))` for every group generator `g`.
    pub integrability: Vec<(usize, f64)>,
}

impl InducedSpace {
    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    /// Position of `a` in a full enumeration.
    pub fn index_of(&self, a: &[usize]) -> Option<usize> {
        if !self.full {
            return self.functions.iter().position(|f| f == a);
        }
        Some(a.iter().fold(0, |acc, &x| acc * self.space_points + x))
    }
}

pub fn induce_space(fga: &FiniteGroupAction, mode: InduceMode) -> Result<InducedSpace> {
    let slots = fga.transversal.len();
    let points = fga.space.len();
    let total = (points as u128).checked_pow(slots as u32).unwrap_or(u128::MAX);
    let x0 = fga.basepoint;
    let (functions, full, y0) = if total <= FULL_ENUMERATION_LIMIT as u128 {
        let total = total as usize;
        let functions: Vec<Vec<usize>> = (0..total)
            .map(|mut code| {
                let mut f = vec![0; slots];
                for slot in (0..slots).rev() {
                    f[slot] = code % points;
                    code /= points;
                }
                f
            })
            .collect();
        let y0 = (0..slots).fold(0, |acc, _| acc * points + x0);
        (functions, true, y0)
    } else {
        match mode {
            InduceMode::Full => {
                return Err(Error::BudgetExceeded {
                    what: "induced space size",
                    limit: FULL_ENUMERATION_LIMIT,
                    partial: usize::try_from(total).unwrap_or(usize::MAX),
                })
            }
            InduceMode::Auto { samples, seed } => {
                let mut rng = crate::rng::trial_rng(seed, 0);
                let mut functions = vec![vec![x0; slots]];
                functions.extend(
                    (0..samples).map(|_| (0..slots).map(|_| rng.gen_range(0..points)).collect()),
                );
                (functions, false, 0)
            }
        }
    };
    let g = &fga.group;
    let integrability = fga
        .gens_group
        .iter()
        .map(|&b| {
            let total: u32 = fga
                .transversal
                .reps
                .iter()
                .map(|&u| {
                    fga.lattice_metric
                        .length(fga.transversal.chi(g.mul(g.inv(b), u)))
                        .expect("cocycle values lie in the lattice")
                })
                .sum();
            (b, f64::from(total) / slots as f64)
        })
        .collect();
    Ok(InducedSpace {
        slots,
        space_points: points,
        functions,
        full,
        y0,
        integrability,
    })
}

/// `d_Y(a, b) = (1/|U|) sum_u d_X(a(u), b(u))`.
pub fn d_y(fga: &FiniteGroupAction, a: &[usize], b: &[usize]) -> f64 {
    let d = fga.space.space();
    let sum: f64 = a.iter().zip(b).map(|(&x, &y)| d.d(x, y)).sum();
    sum / a.len() as f64
}

/// Pointwise coarse median.
pub fn mu_y(fga: &FiniteGroupAction, a: &[usize], b: &[usize], c: &[usize]) -> Vec<usize> {
    (0..a.len()).map(|i| fga.space.median(a[i], b[i], c[i])).collect()
}

/// `(g . a)(u) = chi(g^-1 u)^-1 . a(P(g^-1 u))`.
pub fn apply_induced_action(fga: &FiniteGroupAction, g: usize, a: &[usize]) -> Vec<usize> {
    let grp = &fga.group;
    let t = &fga.transversal;
    let g_inv = grp.inv(g);
    t.reps
        .iter()
        .map(|&u| {
            let h = grp.mul(g_inv, u);
            fga.action.act(grp.inv(t.chi(h)), a[t.slot(h)])
        })
        .collect()
}
