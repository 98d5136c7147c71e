use std::collections::HashSet;

use super::FiniteMedianAlgebra;
use crate::error::{invalid, Error, Result};

/// Largest generator count whose Boolean power `{0,1}^(2^n)` fits in a `u128`.
pub const MAX_FREE_GENERATORS: usize = 7;

#[derive(Debug, Clone)]
pub struct FreeMedianAlgebra {
    pub algebra: FiniteMedianAlgebra,
    /// Indices of the generators inside `algebra` (always `0..n`).
    pub generators: Vec<usize>,
    /// Each element as a vector of `{0,1}^(2^n)`, coordinate `A` at bit `A`.
    pub vectors: Vec<u128>,
}

#[inline]
fn majority(a: u128, b: u128, c: u128) -> u128 {
    (a & b) | (b & c) | (a & c)
}

/// Generator `i` as the indicator of `{A : i in A}` over subsets `A` of the
/// generator set.
fn generator_vector(i: usize, n: usize) -> u128 {
    (0..1usize << n)
        .filter(|subset| subset & (1 << i) != 0)
        .fold(0, |v, subset| v | 1u128 << subset)
}

/// The free median algebra on `n` generators, realized as the majority
/// closure of the canonical generators inside `{0,1}^(2^n)`.
///
/// Generators come first (in order), the remaining elements follow in
/// increasing order of their bit vectors. Fails with
/// [`Error::BudgetExceeded`] once the closure outgrows `cap`.
pub fn free_median_algebra(n: usize, cap: usize) -> Result<FreeMedianAlgebra> {
    if n == 0 {
        return Err(invalid("free median algebra needs at least one generator"));
    }
    if n > MAX_FREE_GENERATORS {
        return Err(invalid(format!(
            "at most {MAX_FREE_GENERATORS} generators are supported"
        )));
    }
    let gens: Vec<u128> = (0..n).map(|i| generator_vector(i, n)).collect();
    let mut members = gens.clone();
    let mut seen: HashSet<u128> = members.iter().copied().collect();
    let mut frontier = 0;
    while frontier < members.len() {
        let new = members[frontier];
        frontier += 1;
        let snapshot = members.len();
        for i in 0..snapshot {
            for j in i..snapshot {
                let m = majority(new, members[i], members[j]);
                if seen.insert(m) {
                    members.push(m);
                    if members.len() > cap {
                        return Err(Error::BudgetExceeded {
                            what: "free median algebra closure",
                            limit: cap,
                            partial: members.len(),
                        });
                    }
                }
            }
        }
    }
    let mut rest = members.split_off(n);
    rest.sort_unstable();
    members.extend(rest);

    let index: std::collections::HashMap<u128, usize> =
        members.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let labels = members
        .iter()
        .enumerate()
        .map(|(i, v)| if i < n { format!("g{i}") } else { format!("m{v:x}") })
        .collect();
    let algebra = FiniteMedianAlgebra::from_fn(labels, |a, b, c| {
        index[&majority(members[a], members[b], members[c])]
    })?;
    Ok(FreeMedianAlgebra {
        algebra,
        generators: (0..n).collect(),
        vectors: members,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::median::verify_median_axioms;

    #[test]
    fn small_sizes() {
        assert_eq!(free_median_algebra(1, 100).unwrap().algebra.len(), 1);
        assert_eq!(free_median_algebra(2, 100).unwrap().algebra.len(), 2);
        let f3 = free_median_algebra(3, 100).unwrap();
        assert_eq!(f3.algebra.len(), 4);
        // The extra element is the median of the three generators.
        assert_eq!(f3.algebra.median(0, 1, 2), 3);
    }

    #[test]
    fn generator_vectors() {
        // n = 2: coordinates are subsets {}, {0}, {1}, {0,1} at bits 0..4.
        assert_eq!(generator_vector(0, 2), 0b1010);
        assert_eq!(generator_vector(1, 2), 0b1100);
    }

    #[test]
    fn budget_is_enforced() {
        match free_median_algebra(4, 10) {
            Err(Error::BudgetExceeded { limit, partial, .. }) => {
                assert_eq!(limit, 10);
                assert!(partial > 10);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn invalid_generator_counts() {
        assert!(free_median_algebra(0, 10).is_err());
        assert!(free_median_algebra(8, 10).is_err());
    }

    #[test]
    fn free_algebras_are_median() {
        for n in 1..=3 {
            let f = free_median_algebra(n, 100).unwrap();
            assert!(verify_median_axioms(&f.algebra).passed());
        }
    }
}
