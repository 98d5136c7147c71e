use rand::Rng;
use serde::Serialize;

use super::FiniteGroup;
use crate::error::Result;

/// Left-coset representatives `U` of a subgroup `Γ`, with the projection
/// `P : G -> U` and the cocycle `chi : G -> Γ` satisfying `g = P(g) chi(g)`.
#[derive(Debug, Clone, Serialize)]
pub struct Transversal {
    /// Representatives in increasing order; the identity is always present.
    pub reps: Vec<usize>,
    proj: Vec<usize>,
    chi: Vec<usize>,
    /// Position in `reps` of `P(g)`, for every `g`.
    slot: Vec<usize>,
}

impl Transversal {
    #[inline]
    pub fn project(&self, g: usize) -> usize {
        self.proj[g]
    }

    #[inline]
    pub fn chi(&self, g: usize) -> usize {
        self.chi[g]
    }

    /// Index into `reps` of the coset containing `g`.
    #[inline]
    pub fn slot(&self, g: usize) -> usize {
        self.slot[g]
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

/// Smallest-index representative of every coset `gΓ`, except that `Γ`
/// itself is represented by the identity.
pub fn build_transversal(group: &FiniteGroup, lattice: &[usize]) -> Result<Transversal> {
    let mask = group.subgroup_mask(lattice)?;
    let members: Vec<usize> = (0..group.order()).filter(|&g| mask[g]).collect();
    let n = group.order();
    let mut proj = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for g in 0..n {
        if proj[g] != usize::MAX {
            continue;
        }
        let rep = if mask[g] { group.identity() } else { g };
        reps.push(rep);
        for &gamma in &members {
            proj[group.mul(g, gamma)] = rep;
        }
    }
    reps.sort_unstable();
    let mut slot = vec![0; n];
    let mut chi = vec![0; n];
    for g in 0..n {
        slot[g] = reps.binary_search(&proj[g]).expect("representative is listed");
        chi[g] = group.mul(group.inv(proj[g]), g);
    }
    Ok(Transversal {
        reps,
        proj,
        chi,
        slot,
    })
}

/// First `(g, h, u)` where the cocycle relation
/// `chi(h^-1 P(g^-1 u)) chi(g^-1 u) = chi(h^-1 g^-1 u)` or the projection
/// relation `P(h^-1 P(g^-1 u)) = P(h^-1 g^-1 u)` fails.
fn cocycle_violation(group: &FiniteGroup, t: &Transversal, g: usize, h: usize, u: usize) -> bool {
    let gi_u = group.mul(group.inv(g), u);
    let hi = group.inv(h);
    let inner = group.mul(hi, t.project(gi_u));
    let whole = group.mul(hi, gi_u);
    group.mul(t.chi(inner), t.chi(gi_u)) != t.chi(whole) || t.project(inner) != t.project(whole)
}

#[derive(Debug, Clone, Serialize)]
pub struct CocycleReport {
    pub passed: bool,
    pub checked: u64,
    pub exhaustive: bool,
    /// `(g, h, u)`.
    pub witness: Option<[usize; 3]>,
    /// First `g` with `g != P(g) chi(g)`, if any.
    pub factorization_witness: Option<usize>,
}

/// Exhaustive over all `g, h` in `G` and `u` in `U`.
pub fn check_cocycle_identity(group: &FiniteGroup, t: &Transversal) -> CocycleReport {
    let mut witness = None;
    let mut checked = 0;
    'outer: for g in 0..group.order() {
        for h in 0..group.order() {
            for &u in &t.reps {
                checked += 1;
                if cocycle_violation(group, t, g, h, u) {
                    witness = Some([g, h, u]);
                    break 'outer;
                }
            }
        }
    }
    finish(group, t, witness, checked, true)
}

/// Spot-checks `samples` uniformly random triples.
pub fn check_cocycle_identity_sampled(
    group: &FiniteGroup,
    t: &Transversal,
    samples: u64,
    seed: u64,
) -> CocycleReport {
    let mut rng = crate::rng::trial_rng(seed, 0);
    let n = group.order();
    let mut witness = None;
    for _ in 0..samples {
        let (g, h) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let u = t.reps[rng.gen_range(0..t.len())];
        if cocycle_violation(group, t, g, h, u) {
            witness = Some([g, h, u]);
            break;
        }
    }
    finish(group, t, witness, samples, false)
}

fn finish(
    group: &FiniteGroup,
    t: &Transversal,
    witness: Option<[usize; 3]>,
    checked: u64,
    exhaustive: bool,
) -> CocycleReport {
    let factorization_witness =
        (0..group.order()).find(|&g| group.mul(t.project(g), t.chi(g)) != g);
    CocycleReport {
        passed: witness.is_none() && factorization_witness.is_none(),
        checked,
        exhaustive,
        witness,
        factorization_witness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z6_mod_even() {
        let z6 = FiniteGroup::cyclic(6);
        let t = build_transversal(&z6, &[0, 2, 4]).unwrap();
        assert_eq!(t.reps, vec![0, 1]);
        assert_eq!(t.project(5), 1);
        assert_eq!(t.chi(5), 4);
        assert_eq!(t.project(0), 0);
        assert_eq!(t.chi(0), 0);
        assert!(check_cocycle_identity(&z6, &t).passed);
    }

    #[test]
    fn whole_group_lattice() {
        let z5 = FiniteGroup::cyclic(5);
        let t = build_transversal(&z5, &[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(t.reps, vec![0]);
        for g in 0..5 {
            assert_eq!(t.chi(g), g);
        }
        assert!(check_cocycle_identity(&z5, &t).passed);
    }

    #[test]
    fn identity_is_its_own_representative() {
        // Z/4 relabelled so that the identity is 2; the subgroup {0, 2} has
        // smallest element 0, but the identity must represent it.
        let rows: Vec<Vec<usize>> = (0..4).map(|a| (0..4).map(|b| (a + b + 2) % 4).collect()).collect();
        let g = FiniteGroup::from_table(rows).unwrap();
        assert_eq!(g.identity(), 2);
        let t = build_transversal(&g, &[0, 2]).unwrap();
        assert_eq!(t.reps, vec![1, 2]);
        assert_eq!(t.project(0), 2);
        assert_eq!(t.chi(2), 2);
        assert!(check_cocycle_identity(&g, &t).passed);
    }

    #[test]
    fn broken_transversal_is_caught() {
        let z6 = FiniteGroup::cyclic(6);
        let mut t = build_transversal(&z6, &[0, 2, 4]).unwrap();
        t.chi[3] = 0;
        let r = check_cocycle_identity(&z6, &t);
        assert!(!r.passed);
        let s = check_cocycle_identity_sampled(&z6, &t, 2_000, 5);
        assert!(!s.passed);
        assert!(!s.exhaustive);
    }

    #[test]
    fn not_a_subgroup() {
        let z6 = FiniteGroup::cyclic(6);
        assert!(build_transversal(&z6, &[0, 1]).is_err());
    }
}
