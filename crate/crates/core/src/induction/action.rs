use std::collections::{BTreeMap, VecDeque};

use super::group::{check_permutation, compose};
use super::FiniteGroup;
use crate::error::{invalid, Result};
use crate::metric::{approx_eq, FiniteMetricSpace};

/// A group acting on `0..points` by permutations. Only the elements the
/// action was generated for carry a permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermAction {
    points: usize,
    perms: Vec<Option<Vec<usize>>>,
}

impl PermAction {
    /// Extends the listed permutations to every product of `gens`, starting
    /// from the identity, and checks that the result is a homomorphism on
    /// `domain`, which must be fully covered. Listed entries for products
    /// must agree with the extension.
    pub fn generate(
        group: &FiniteGroup,
        points: usize,
        given: &BTreeMap<usize, Vec<usize>>,
        gens: &[usize],
        domain: &[usize],
    ) -> Result<Self> {
        let mut perms: Vec<Option<Vec<usize>>> = vec![None; group.order()];
        for (&g, p) in given {
            group.check_element(g)?;
            check_permutation(p, points)?;
            perms[g] = Some(p.clone());
        }
        let id: Vec<usize> = (0..points).collect();
        let e = group.identity();
        if perms[e].as_ref().is_some_and(|p| *p != id) {
            return Err(invalid("the identity must act trivially"));
        }
        perms[e] = Some(id);
        let mut gen_perms = Vec::with_capacity(gens.len());
        for &s in gens {
            group.check_element(s)?;
            let p = perms[s]
                .clone()
                .ok_or_else(|| invalid(format!("no permutation given for generator {s}")))?;
            gen_perms.push((s, p));
        }
        let mut reached = vec![false; group.order()];
        reached[e] = true;
        let mut queue = VecDeque::from([e]);
        while let Some(g) = queue.pop_front() {
            let pg = perms[g].clone().expect("reached elements carry a permutation");
            for (s, ps) in &gen_perms {
                let h = group.mul(g, *s);
                let ph = compose(&pg, ps);
                match &perms[h] {
                    Some(existing) if *existing != ph => {
                        return Err(invalid(format!(
                            "listed permutation for {h} disagrees with the product of generators"
                        )));
                    }
                    _ => perms[h] = Some(ph),
                }
                if !reached[h] {
                    reached[h] = true;
                    queue.push_back(h);
                }
            }
        }
        if let Some(&g) = domain.iter().find(|&&g| perms[g].is_none()) {
            return Err(invalid(format!("no permutation for element {g}")));
        }
        let action = Self { points, perms };
        for &a in domain {
            for &b in domain {
                let lhs = action.perm(group.mul(a, b)).expect("domain is covered");
                let rhs = compose(action.perm(a).unwrap(), action.perm(b).unwrap());
                if lhs != rhs.as_slice() {
                    return Err(invalid(format!("action law fails for ({a},{b})")));
                }
            }
        }
        Ok(action)
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn perm(&self, g: usize) -> Option<&[usize]> {
        self.perms.get(g).and_then(|p| p.as_deref())
    }

    /// `g . x`. Panics if `g` carries no permutation.
    #[inline]
    pub fn act(&self, g: usize, x: usize) -> usize {
        self.perms[g].as_ref().expect("element acts")[x]
    }

    /// First `(g, x, y)` with `d(g.x, g.y) != d(x, y)`.
    pub fn isometry_violation(
        &self,
        space: &FiniteMetricSpace,
        domain: &[usize],
    ) -> Option<(usize, usize, usize)> {
        for &g in domain {
            for x in 0..self.points {
                for y in 0..self.points {
                    if !approx_eq(space.d(self.act(g, x), self.act(g, y)), space.d(x, y)) {
                        return Some((g, x, y));
                    }
                }
            }
        }
        None
    }
}
