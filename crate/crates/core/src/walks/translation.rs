use serde::Serialize;

use crate::error::{invalid, Result};
use crate::induction::{FiniteGroup, PermAction};
use crate::metric::FiniteMetricSpace;

pub const DEFAULT_LOXODROMIC_THRESHOLD: f64 = 1e-3;

/// `n -> d(g^n . x, x)` for a fixed isometry `g` and point `x`.
pub trait Displacement {
    fn displacement(&self, n: u64) -> Result<f64>;
}

/// Shift by `shift` on the line graph over `-half_width..=half_width`,
/// evaluated at `0`; powers must stay on the graph.
#[derive(Debug, Clone, Copy)]
pub struct LineShift {
    pub shift: i64,
    pub half_width: i64,
}

impl Displacement for LineShift {
    fn displacement(&self, n: u64) -> Result<f64> {
        let reach = self.shift.unsigned_abs().saturating_mul(n);
        if reach > self.half_width.unsigned_abs() {
            return Err(invalid(format!("power {n} leaves the line of half-width {}", self.half_width)));
        }
        Ok(reach as f64)
    }
}

/// A finite group element acting on a finite space.
#[derive(Debug, Clone, Copy)]
pub struct OrbitPower<'a> {
    pub group: &'a FiniteGroup,
    pub action: &'a PermAction,
    pub space: &'a FiniteMetricSpace,
    pub element: usize,
    pub point: usize,
}

impl Displacement for OrbitPower<'_> {
    fn displacement(&self, n: u64) -> Result<f64> {
        let order = self.group.element_order(self.element) as u64;
        let g = self.group.pow(self.element, (n % order) as usize);
        Ok(self.space.d(self.action.act(g, self.point), self.point))
    }
}

/// A free-group word acting on the Cayley tree truncated at `depth_cap`,
/// evaluated at the root. Letters use `2i` for generator `i` and `2i+1` for
/// its inverse.
#[derive(Debug, Clone)]
pub struct FreeWordPower {
    pub word: Vec<usize>,
    pub depth_cap: usize,
}

impl FreeWordPower {
    pub fn reduce(word: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::with_capacity(word.len());
        for &l in word {
            if out.last() == Some(&(l ^ 1)) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        out
    }
}

impl Displacement for FreeWordPower {
    fn displacement(&self, n: u64) -> Result<f64> {
        let w = Self::reduce(&self.word);
        // Strip the conjugating prefix: w = c u c^-1 with u cyclically reduced.
        let mut k = 0;
        while k < w.len() / 2 && w[k] == w[w.len() - 1 - k] ^ 1 {
            k += 1;
        }
        let core = (w.len() - 2 * k) as u64;
        let len = if core == 0 { 0 } else { 2 * k as u64 + core * n };
        if len > self.depth_cap as u64 {
            return Err(invalid(format!("power {n} leaves the tree of depth {}", self.depth_cap)));
        }
        Ok(len as f64)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TranslationReport {
    pub estimate: f64,
    /// Inclusive window of powers the minimum was taken over.
    pub window: (u64, u64),
    pub loxodromic: bool,
    pub threshold: f64,
    pub ratios: Vec<(u64, f64)>,
}

/// Minimum of `d(g^n . x, x) / n` over `n` in `[ceil(n_max/2), n_max]`.
pub fn translation_length(
    disp: &impl Displacement,
    n_max: u64,
    threshold: f64,
) -> Result<TranslationReport> {
    if n_max == 0 {
        return Err(invalid("n_max must be positive"));
    }
    let lo = n_max.div_ceil(2);
    let ratios = (1..=n_max)
        .map(|n| Ok((n, disp.displacement(n)? / n as f64)))
        .collect::<Result<Vec<_>>>()?;
    let estimate = ratios[(lo - 1) as usize..]
        .iter()
        .map(|r| r.1)
        .fold(f64::INFINITY, f64::min);
    Ok(TranslationReport {
        estimate,
        window: (lo, n_max),
        loxodromic: estimate > threshold,
        threshold,
        ratios,
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::metric::Graph;

    #[test]
    fn unit_shift_is_loxodromic() {
        let r = translation_length(&LineShift { shift: 1, half_width: 1000 }, 50, DEFAULT_LOXODROMIC_THRESHOLD)
            .unwrap();
        assert_eq!(r.estimate, 1.0);
        assert!(r.loxodromic);
        assert!(translation_length(&LineShift { shift: 1, half_width: 10 }, 50, 1e-3).is_err());
    }

    #[test]
    fn finite_order_is_elliptic() {
        let g = FiniteGroup::cyclic(6);
        let act = PermAction::generate(
            &g,
            6,
            &BTreeMap::from([(1, vec![1, 2, 3, 4, 5, 0])]),
            &[1],
            &(0..6).collect::<Vec<_>>(),
        )
        .unwrap();
        let space = Graph::cycle(6).unwrap().metric().unwrap();
        for e in 0..6 {
            let p = OrbitPower { group: &g, action: &act, space: &space, element: e, point: 0 };
            let r = translation_length(&p, 12, DEFAULT_LOXODROMIC_THRESHOLD).unwrap();
            assert_eq!(r.estimate, 0.0);
            assert!(!r.loxodromic);
        }
    }

    #[test]
    fn free_generator_translates_by_one() {
        let a = FreeWordPower { word: vec![0], depth_cap: 100 };
        assert_eq!(translation_length(&a, 40, 1e-3).unwrap().estimate, 1.0);
        // b a b^-1 has translation length one as well.
        let conj = FreeWordPower { word: vec![2, 0, 3], depth_cap: 100 };
        let r = translation_length(&conj, 40, 1e-3).unwrap();
        assert!((r.estimate - 42.0 / 40.0).abs() < 1e-12);
        let trivial = FreeWordPower { word: vec![0, 1], depth_cap: 5 };
        assert_eq!(translation_length(&trivial, 40, 1e-3).unwrap().estimate, 0.0);
    }
}
