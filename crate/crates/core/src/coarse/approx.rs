use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::metric::{approx_eq, FiniteMetricSpace, Graph};
use crate::EPS;

/// A rooted metric tree with real edge lengths. Node 0 is the root.
#[derive(Debug, Clone, Serialize)]
pub struct ApproxTree {
    pub parent: Vec<Option<usize>>,
    /// Distance from the root.
    pub depth: Vec<f64>,
}

impl ApproxTree {
    fn root() -> Self {
        Self {
            parent: vec![None],
            depth: vec![0.0],
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    fn add(&mut self, parent: Option<usize>, depth: f64) -> usize {
        self.parent.push(parent);
        self.depth.push(depth);
        self.len() - 1
    }

    pub fn edge_length(&self, v: usize) -> f64 {
        self.parent[v].map_or(0.0, |p| self.depth[v] - self.depth[p])
    }

    pub fn is_ancestor(&self, anc: usize, mut v: usize) -> bool {
        loop {
            if v == anc {
                return true;
            }
            match self.parent[v] {
                Some(p) => v = p,
                None => return false,
            }
        }
    }

    pub fn lca(&self, u: usize, v: usize) -> usize {
        let mut a = u;
        while !self.is_ancestor(a, v) {
            a = self.parent[a].expect("root is an ancestor of every node");
        }
        a
    }

    pub fn dist(&self, u: usize, v: usize) -> f64 {
        self.depth[u] + self.depth[v] - 2.0 * self.depth[self.lca(u, v)]
    }

    /// Median of three nodes: the deepest of the three pairwise meeting points.
    pub fn median(&self, x: usize, y: usize, z: usize) -> usize {
        let cands = [self.lca(x, y), self.lca(y, z), self.lca(x, z)];
        let mut best = cands[0];
        for &c in &cands[1..] {
            if self.depth[c] > self.depth[best] {
                best = c;
            }
        }
        best
    }

    /// Point at depth `t` on the root path of `v`, subdividing an edge if needed.
    fn point_on_root_path(&mut self, mut v: usize, t: f64) -> usize {
        while let Some(p) = self.parent[v] {
            if self.depth[p] >= t - EPS {
                v = p;
            } else {
                break;
            }
        }
        if approx_eq(self.depth[v], t) {
            return v;
        }
        let u = self.add(self.parent[v], t);
        self.parent[v] = Some(u);
        u
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ApproximationData {
    pub basepoint: usize,
    pub tree: ApproxTree,
    /// `(a, node)` for each point of the subset, in insertion order.
    pub pi: Vec<(usize, usize)>,
    /// Space vertex assigned to every tree node.
    pub eta: Vec<usize>,
    /// Max over pairs in the subset of `|d(a, b) - d_tree(pi a, pi b)|`.
    pub distortion: f64,
}

/// Default distortion allowance `4 delta (ceil(log2 p) + 1)`.
pub fn distortion_bound(delta: f64, p: usize) -> f64 {
    let log = if p <= 1 {
        0
    } else {
        usize::BITS - (p - 1).leading_zeros()
    };
    4.0 * delta * (f64::from(log) + 1.0)
}

fn gromov_product(d: &FiniteMetricSpace, x: usize, y: usize, w: usize) -> f64 {
    (d.d(x, w) + d.d(y, w) - d.d(x, y)) / 2.0
}

/// Gromov-product tree of `subset` based at `basepoint`.
///
/// The basepoint is the root; the other points are inserted in index order.
/// A new point `x` branches off the root path of the inserted `y` with the
/// largest `(x|y)_w` (smallest index on ties), at depth `(x|y)_w`, and hangs at
/// depth `d(x, w)`. Each node is sent back to the graph along the canonical
/// geodesic from `w` to a subset point below it, rounding the depth down.
pub fn approximation_tree(
    graph: &Graph,
    space: &FiniteMetricSpace,
    subset: &[usize],
    basepoint: usize,
) -> Result<ApproximationData> {
    if subset.is_empty() {
        return Err(invalid("approximation needs a nonempty subset"));
    }
    for &a in subset {
        space.check_point(a)?;
    }
    if !subset.contains(&basepoint) {
        return Err(invalid(format!("basepoint {basepoint} is not in the subset")));
    }
    if graph.vertex_count() != space.len() {
        return Err(invalid("graph and metric space sizes differ"));
    }
    let mut order: Vec<usize> = subset.iter().copied().filter(|&a| a != basepoint).collect();
    order.sort_unstable();
    order.dedup();
    let w = basepoint;

    let mut tree = ApproxTree::root();
    let mut pi: Vec<(usize, usize)> = vec![(w, 0)];
    for &x in &order {
        let mut best = (0.0, 0);
        for &(y, node) in &pi {
            let g = gromov_product(space, x, y, w);
            if g > best.0 + EPS {
                best = (g, node);
            }
        }
        let attach = tree.point_on_root_path(best.1, best.0);
        let node = if approx_eq(space.d(x, w), best.0) {
            attach
        } else {
            tree.add(Some(attach), space.d(x, w))
        };
        pi.push((x, node));
    }

    let mut eta = Vec::with_capacity(tree.len());
    for v in 0..tree.len() {
        let exact = pi.iter().filter(|&&(_, node)| node == v).map(|&(a, _)| a).min();
        let below = pi
            .iter()
            .filter(|&&(_, node)| tree.is_ancestor(v, node))
            .map(|&(a, _)| a)
            .min();
        let target = exact.or(below).ok_or_else(|| {
            Error::InternalContradiction(format!("tree node {v} has no subset point below it"))
        })?;
        let geodesic = graph.geodesic(w, target)?;
        let step = (tree.depth[v] + EPS).floor() as usize;
        eta.push(geodesic[step.min(geodesic.len() - 1)]);
    }

    let mut distortion: f64 = 0.0;
    for (i, &(a, na)) in pi.iter().enumerate() {
        for &(b, nb) in &pi[i + 1..] {
            distortion = distortion.max((space.d(a, b) - tree.dist(na, nb)).abs());
        }
    }
    Ok(ApproximationData {
        basepoint,
        tree,
        pi,
        eta,
        distortion,
    })
}
