//! Induction of a lattice action to the ambient finite group.
//!
//! Given `Γ <= G`, a transversal `U`, and an isometric action of `Γ` on a
//! graph `X`, the induced space is the set of functions `U -> X` with the
//! averaged distance and pointwise coarse median. `G` acts on it through the
//! cocycle `chi`:
//!
//! ```text
//! (g . a)(u) = chi(g^-1 u)^-1 . a(P(g^-1 u))
//! ```

mod action;
mod group;
mod induced;
mod transversal;
mod verify;

pub use action::PermAction;
pub use group::{FiniteGroup, GroupFile, WordMetric};
pub use induced::{
    apply_induced_action, d_y, induce_space, mu_y, InduceMode, InducedSpace,
    FULL_ENUMERATION_LIMIT, SAMPLED_FUNCTIONS,
};
pub use transversal::{
    build_transversal, check_cocycle_identity, check_cocycle_identity_sampled, CocycleReport,
    Transversal,
};
pub use verify::{verify_induced_action, Check, InducedReport, VerifyConfig};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::coarse::CoarseMedianStructure;
use crate::error::{invalid, Result};
use crate::metric::Graph;

/// On-disk form of a lattice action: permutations keyed by the decimal index
/// of lattice elements (generators suffice), plus the basepoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionFile {
    pub space: String,
    pub action: BTreeMap<String, Vec<usize>>,
    pub basepoint: usize,
}

impl ActionFile {
    pub fn permutations(&self) -> Result<BTreeMap<usize, Vec<usize>>> {
        self.action
            .iter()
            .map(|(k, v)| {
                k.parse::<usize>()
                    .map(|g| (g, v.clone()))
                    .map_err(|_| invalid(format!("action key {k:?} is not an element index")))
            })
            .collect()
    }
}

/// A finite group `G`, a lattice `Γ`, its transversal, and an isometric
/// action of `Γ` on a graph carrying the min-sum coarse median.
#[derive(Debug, Clone)]
pub struct FiniteGroupAction {
    pub group: FiniteGroup,
    pub lattice: Vec<usize>,
    pub transversal: Transversal,
    pub space: CoarseMedianStructure,
    pub action: PermAction,
    pub basepoint: usize,
    pub gens_lattice: Vec<usize>,
    pub gens_group: Vec<usize>,
    pub lattice_metric: WordMetric,
    pub group_metric: WordMetric,
}

impl FiniteGroupAction {
    pub fn new(
        group: FiniteGroup,
        mut lattice: Vec<usize>,
        gens_lattice: Vec<usize>,
        gens_group: Vec<usize>,
        space: CoarseMedianStructure,
        given: &BTreeMap<usize, Vec<usize>>,
        basepoint: usize,
    ) -> Result<Self> {
        lattice.sort_unstable();
        lattice.dedup();
        let transversal = build_transversal(&group, &lattice)?;
        if let Some(&s) = gens_lattice.iter().find(|s| lattice.binary_search(s).is_err()) {
            return Err(invalid(format!("lattice generator {s} is not in the lattice")));
        }
        if let Some(&g) = given.keys().find(|g| lattice.binary_search(g).is_err()) {
            return Err(invalid(format!("element {g} acts on the space but is not in the lattice")));
        }
        space.space().check_point(basepoint)?;
        let all: Vec<usize> = (0..group.order()).collect();
        let lattice_metric = group.word_metric(&gens_lattice, &lattice)?;
        let group_metric = group.word_metric(&gens_group, &all)?;
        let action = PermAction::generate(&group, space.len(), given, &gens_lattice, &lattice)?;
        if let Some((g, x, y)) = action.isometry_violation(space.space(), &lattice) {
            return Err(invalid(format!(
                "lattice element {g} does not act isometrically: d({x},{y}) changes"
            )));
        }
        Ok(Self {
            group,
            lattice,
            transversal,
            space,
            action,
            basepoint,
            gens_lattice,
            gens_group,
            lattice_metric,
            group_metric,
        })
    }

    pub fn from_files(
        group_file: &GroupFile,
        graph: Graph,
        action_file: &ActionFile,
    ) -> Result<Self> {
        let group = group_file.group()?;
        let space = CoarseMedianStructure::new(action_file.space.clone(), graph)?;
        Self::new(
            group,
            group_file.lattice.clone(),
            group_file.gens_lattice.clone(),
            group_file.gens_group.clone(),
            space,
            &action_file.permutations()?,
            action_file.basepoint,
        )
    }

    /// Largest displacement `d(mu(γx, γy, γz), γ mu(x, y, z))` over the lattice.
    pub fn median_quasi_preservation(&self) -> (f64, Option<[usize; 4]>) {
        let n = self.space.len();
        let d = self.space.space();
        let mut best = (0.0, None);
        for &g in &self.lattice {
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        let a = &self.action;
                        let lhs = self.space.median(a.act(g, x), a.act(g, y), a.act(g, z));
                        let rhs = a.act(g, self.space.median(x, y, z));
                        let e = d.d(lhs, rhs);
                        if e > best.0 {
                            best = (e, Some([g, x, y, z]));
                        }
                    }
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn action_file_keys_must_be_indices() {
        let f = ActionFile {
            space: "x".into(),
            action: BTreeMap::from([("one".to_string(), vec![0])]),
            basepoint: 0,
        };
        assert!(f.permutations().is_err());
    }

    #[test]
    fn non_isometric_lattice_action_is_rejected() {
        let z4 = FiniteGroup::cyclic(4);
        let space = CoarseMedianStructure::new("p4", Graph::path(4)).unwrap();
        let given = BTreeMap::from([(1, vec![1, 2, 3, 0])]);
        let r = FiniteGroupAction::new(z4, vec![0, 1, 2, 3], vec![1], vec![1], space, &given, 0);
        assert!(r.is_err());
    }
}
