use serde::Serialize;

use super::{FiniteMedianAlgebra, IntervalTable};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankResult {
    /// Largest cube dimension found, at most the search cap.
    pub rank: usize,
    /// True when the search stopped at the cap, so the true rank is `>= rank`.
    pub at_cap: bool,
    /// Image of each cube vertex (bitmask order) under the witness embedding.
    pub embedding: Vec<usize>,
}

/// Largest `n <= cap` such that `{0,1}^n` embeds as a median subalgebra.
///
/// An embedding `f` is pinned down by `o = f(0..0)`, `t = f(1..1)` and the
/// images `c_i` of the unit vectors: every other vertex is reached through
/// `f(v + e_i) = mu(f(v), c_i, t)`. The `c_i` must lie in `[o, t]` and be
/// pairwise orthogonal at `o` (`mu(c_i, c_j, o) = o`); candidates are chosen in
/// increasing index order, which quotients out coordinate permutations.
/// Every candidate map is then checked in full.
pub fn rank(alg: &FiniteMedianAlgebra, cap: usize) -> RankResult {
    let mut best = RankResult {
        rank: 0,
        at_cap: cap == 0,
        embedding: vec![0],
    };
    if alg.len() < 2 || cap == 0 {
        return best;
    }
    let intervals = IntervalTable::new(alg);
    for n in 1..=cap {
        if alg.len() < 1 << n {
            return best;
        }
        match find_cube(alg, &intervals, n) {
            Some(embedding) => {
                best = RankResult {
                    rank: n,
                    at_cap: n == cap,
                    embedding,
                }
            }
            None => return best,
        }
    }
    best
}

fn find_cube(alg: &FiniteMedianAlgebra, intervals: &IntervalTable, n: usize) -> Option<Vec<usize>> {
    let size = alg.len();
    for o in 0..size {
        for t in 0..size {
            if t == o {
                continue;
            }
            if n == 1 {
                return Some(vec![o, t]);
            }
            let candidates: Vec<usize> = intervals
                .get(o, t)
                .ones()
                .filter(|&c| c != o && c != t)
                .collect();
            if candidates.len() < n {
                continue;
            }
            let mut chosen = Vec::with_capacity(n);
            if let Some(f) = extend(alg, &candidates, 0, o, t, n, &mut chosen) {
                return Some(f);
            }
        }
    }
    None
}

fn extend(
    alg: &FiniteMedianAlgebra,
    candidates: &[usize],
    start: usize,
    o: usize,
    t: usize,
    n: usize,
    chosen: &mut Vec<usize>,
) -> Option<Vec<usize>> {
    if chosen.len() == n {
        return realize(alg, o, t, chosen);
    }
    let needed = n - chosen.len();
    for i in start..candidates.len() {
        if candidates.len() - i < needed {
            break;
        }
        let c = candidates[i];
        if chosen.iter().all(|&d| alg.median(c, d, o) == o) {
            chosen.push(c);
            if let Some(f) = extend(alg, candidates, i + 1, o, t, n, chosen) {
                return Some(f);
            }
            chosen.pop();
        }
    }
    None
}

/// Builds the candidate map from its generators and checks that it is an
/// injective median homomorphism.
fn realize(alg: &FiniteMedianAlgebra, o: usize, t: usize, units: &[usize]) -> Option<Vec<usize>> {
    let n = units.len();
    let vertices = 1usize << n;
    let mut f = vec![o; vertices];
    for mask in 1..vertices {
        let top = usize::BITS as usize - 1 - mask.leading_zeros() as usize;
        f[mask] = alg.median(f[mask & !(1 << top)], units[top], t);
    }
    let mut seen = vec![false; alg.len()];
    for &x in &f {
        if std::mem::replace(&mut seen[x], true) {
            return None;
        }
    }
    for a in 0..vertices {
        for b in 0..vertices {
            for c in 0..vertices {
                let maj = (a & b) | (b & c) | (a & c);
                if f[maj] != alg.median(f[a], f[b], f[c]) {
                    return None;
                }
            }
        }
    }
    Some(f)
}
