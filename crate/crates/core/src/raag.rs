//! Stars, links, admissible orders and the SL-dimension of a defining graph.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::metric::Graph;

/// Largest graph handled by the bitmask clique search.
pub const MAX_VERTICES: usize = 64;
/// Search nodes explored before giving up.
pub const CLIQUE_NODE_BUDGET: usize = 50_000_000;

/// `(st(v), lk(v))`, both sorted.
pub fn star_link(x: &Graph, v: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    if v >= x.vertex_count() {
        return Err(Error::UnknownElement(v));
    }
    let mut link = x.neighbors(v).to_vec();
    link.sort_unstable();
    let mut star = link.clone();
    let pos = star.binary_search(&v).unwrap_err();
    star.insert(pos, v);
    Ok((star, link))
}

fn masks(x: &Graph) -> Result<(Vec<u64>, Vec<u64>)> {
    let n = x.vertex_count();
    if n > MAX_VERTICES {
        return Err(Error::BudgetExceeded {
            what: "defining graph vertices",
            limit: MAX_VERTICES,
            partial: n,
        });
    }
    let link: Vec<u64> = (0..n)
        .map(|v| x.neighbors(v).iter().fold(0, |m, &w| m | 1 << w))
        .collect();
    let star = link.iter().enumerate().map(|(v, &l)| l | 1 << v).collect();
    Ok((link, star))
}

/// A relation on the vertices, `rel[v][w]` meaning `v ≺ w`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub rel: Vec<Vec<bool>>,
}

impl Relation {
    pub fn len(&self) -> usize {
        self.rel.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rel.is_empty()
    }

    pub fn holds(&self, v: usize, w: usize) -> bool {
        self.rel[v][w]
    }

    pub fn equivalent(&self, v: usize, w: usize) -> bool {
        self.rel[v][w] && self.rel[w][v]
    }

    /// Classes of mutual relatedness, each sorted and listed by smallest member.
    /// Only meaningful when mutual relatedness is transitive, as for `prec_max`.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for v in 0..n {
            if !seen[v] {
                let class: Vec<usize> = (v..n).filter(|&w| w == v || self.equivalent(v, w)).collect();
                for &w in &class {
                    seen[w] = true;
                }
                out.push(class);
            }
        }
        out
    }

    /// The relation on the listed vertices, renumbered in the given order.
    pub fn restrict(&self, vertices: &[usize]) -> Result<Self> {
        if let Some(&v) = vertices.iter().find(|&&v| v >= self.len()) {
            return Err(Error::UnknownElement(v));
        }
        Ok(Self {
            rel: vertices.iter().map(|&v| vertices.iter().map(|&w| self.rel[v][w]).collect()).collect(),
        })
    }

    /// First `(v, w)` with `v ≺ w` but `lk(v)` not inside `st(w)`.
    pub fn admissibility_violation(&self, x: &Graph) -> Result<Option<(usize, usize)>> {
        let n = x.vertex_count();
        if self.len() != n || self.rel.iter().any(|r| r.len() != n) {
            return Err(invalid(format!("relation must be {n} x {n}")));
        }
        let (link, star) = masks(x)?;
        for v in 0..n {
            for w in 0..n {
                if self.rel[v][w] && link[v] & !star[w] != 0 {
                    return Ok(Some((v, w)));
                }
            }
        }
        Ok(None)
    }
}

/// `v ≺_max w` iff `lk(v) ⊆ st(w)`, with its equivalence classes.
#[derive(Debug, Clone, Serialize)]
pub struct PrecMax {
    pub relation: Relation,
    pub classes: Vec<Vec<usize>>,
}

pub fn prec_max(x: &Graph) -> Result<PrecMax> {
    let (link, star) = masks(x)?;
    let n = x.vertex_count();
    let relation = Relation {
        rel: (0..n)
            .map(|v| (0..n).map(|w| link[v] & !star[w] == 0).collect())
            .collect(),
    };
    debug_assert_eq!(relation.admissibility_violation(x).ok(), Some(None));
    let classes = relation.classes();
    Ok(PrecMax { relation, classes })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DslMode<'a> {
    /// Cliques whose vertices all have the same star.
    SameStar,
    /// Cliques whose vertices are pairwise equivalent under an admissible relation.
    Prec(&'a Relation),
}

#[derive(Debug, Clone, Serialize)]
pub struct DslReport {
    pub dsl: usize,
    pub witness_clique: Vec<usize>,
    pub nodes: usize,
}

/// Exact maximum clique in `x` among vertices pairwise compatible under `mode`.
pub fn compute_dsl(x: &Graph, mode: DslMode<'_>) -> Result<DslReport> {
    let n = x.vertex_count();
    let (_, star) = masks(x)?;
    if let DslMode::Prec(rel) = &mode {
        if let Some((v, w)) = rel.admissibility_violation(x)? {
            return Err(invalid(format!("order is not admissible: {v} ≺ {w} but lk({v}) is not in st({w})")));
        }
    }
    let compatible = |v: usize, w: usize| match &mode {
        DslMode::SameStar => star[v] == star[w],
        DslMode::Prec(rel) => rel.equivalent(v, w),
    };
    let adj: Vec<u64> = (0..n)
        .map(|v| {
            x.neighbors(v)
                .iter()
                .filter(|&&w| compatible(v, w))
                .fold(0, |m, &w| m | 1 << w)
        })
        .collect();
    let mut search = CliqueSearch {
        adj: &adj,
        best: 0,
        nodes: 0,
    };
    if n == 0 {
        return Ok(DslReport { dsl: 0, witness_clique: vec![], nodes: 0 });
    }
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    search.expand(0, all)?;
    let witness_clique: Vec<usize> = (0..n).filter(|&v| search.best >> v & 1 == 1).collect();
    Ok(DslReport {
        dsl: witness_clique.len(),
        witness_clique,
        nodes: search.nodes,
    })
}

struct CliqueSearch<'a> {
    adj: &'a [u64],
    best: u64,
    nodes: usize,
}

impl CliqueSearch<'_> {
    /// Branch and bound over candidates in increasing vertex order, so the
    /// first maximum clique found is the lexicographically smallest.
    fn expand(&mut self, clique: u64, mut cand: u64) -> Result<()> {
        self.nodes += 1;
        if self.nodes > CLIQUE_NODE_BUDGET {
            return Err(Error::BudgetExceeded {
                what: "clique search nodes",
                limit: CLIQUE_NODE_BUDGET,
                partial: self.best.count_ones() as usize,
            });
        }
        if clique.count_ones() > self.best.count_ones() {
            self.best = clique;
        }
        while cand != 0 {
            if clique.count_ones() + cand.count_ones() <= self.best.count_ones() {
                return Ok(());
            }
            let v = cand.trailing_zeros() as usize;
            cand &= !(1 << v);
            self.expand(clique | 1 << v, cand & self.adj[v])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stars_and_links() {
        let p = Graph::path(3);
        assert_eq!(star_link(&p, 1).unwrap(), (vec![0, 1, 2], vec![0, 2]));
        assert_eq!(star_link(&Graph::empty(2), 0).unwrap(), (vec![0], vec![]));
        let k4 = Graph::complete(4);
        for v in 0..4 {
            assert_eq!(star_link(&k4, v).unwrap().0, vec![0, 1, 2, 3]);
        }
        assert!(star_link(&p, 3).is_err());
    }

    #[test]
    fn prec_max_on_a_path() {
        let pm = prec_max(&Graph::path(3)).unwrap();
        assert!(pm.relation.holds(0, 1));
        assert!(!pm.relation.holds(1, 0));
        assert_eq!(pm.classes, vec![vec![0, 2], vec![1]]);
    }

    #[test]
    fn complete_and_edgeless_graphs_are_one_class() {
        assert_eq!(prec_max(&Graph::complete(4)).unwrap().classes.len(), 1);
        assert_eq!(prec_max(&Graph::empty(5)).unwrap().classes.len(), 1);
    }

    #[test]
    fn same_star_values() {
        assert_eq!(compute_dsl(&Graph::complete(5), DslMode::SameStar).unwrap().dsl, 5);
        assert_eq!(compute_dsl(&Graph::path(3), DslMode::SameStar).unwrap().dsl, 1);
        assert_eq!(compute_dsl(&Graph::cycle(4).unwrap(), DslMode::SameStar).unwrap().dsl, 1);
        assert_eq!(compute_dsl(&Graph::empty(3), DslMode::SameStar).unwrap().dsl, 1);
    }

    #[test]
    fn inadmissible_order_is_rejected_with_witness() {
        let p = Graph::path(3);
        let mut rel = prec_max(&p).unwrap().relation;
        rel.rel[1][0] = true;
        assert_eq!(rel.admissibility_violation(&p).unwrap(), Some((1, 0)));
        assert!(compute_dsl(&p, DslMode::Prec(&rel)).is_err());
    }

    #[test]
    fn prec_mode_dominates_same_star() {
        // Two triangles sharing an edge: the shared vertices have equal stars.
        let x = Graph::new(4, &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]).unwrap();
        let same = compute_dsl(&x, DslMode::SameStar).unwrap();
        assert_eq!(same.witness_clique, vec![1, 2]);
        let pm = prec_max(&x).unwrap();
        assert!(compute_dsl(&x, DslMode::Prec(&pm.relation)).unwrap().dsl >= same.dsl);
    }
}
