use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::FiniteMetricSpace;
use crate::error::{invalid, Error, Result};

/// A simple undirected graph on vertices `0..n` with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

/// On-disk form: `{"vertices": n, "edges": [[i, j], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
}

impl Graph {
    /// Rejects loops, repeated edges and out-of-range endpoints.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(invalid(format!("edge ({u},{v}) leaves the vertex range 0..{n}")));
            }
            if u == v {
                return Err(invalid(format!("loop at vertex {u}")));
            }
            if adj[u].contains(&v) {
                return Err(invalid(format!("repeated edge ({u},{v})")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Self { adj })
    }

    pub fn empty(n: usize) -> Self {
        Self { adj: vec![Vec::new(); n] }
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(n, &edges).expect("path is simple")
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(invalid("a simple cycle needs at least 3 vertices"));
        }
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::new(n, &edges)
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        Self::new(n, &edges).expect("complete graph is simple")
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let edges: Vec<_> = (0..a).flat_map(|i| (a..a + b).map(move |j| (i, j))).collect();
        Self::new(a + b, &edges).expect("complete bipartite graph is simple")
    }

    /// The hypercube graph `Q_n`; vertex `i` is the bit vector of `i`.
    pub fn hypercube(n: usize) -> Self {
        let edges: Vec<_> = (0..1usize << n)
            .flat_map(|v| (0..n).filter(move |b| v & (1 << b) == 0).map(move |b| (v, v | 1 << b)))
            .collect();
        Self::new(1 << n, &edges).expect("hypercube is simple")
    }

    pub fn grid(rows: usize, cols: usize) -> Self {
        Self::path(rows).box_product(&Self::path(cols))
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
            .collect()
    }

    /// Breadth-first distances from `src`; `u32::MAX` marks unreachable vertices.
    pub fn bfs(&self, src: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.vertex_count()];
        let mut queue = VecDeque::new();
        dist[src] = 0;
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if dist[v] == u32::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count() == 0 || self.bfs(0).iter().all(|&d| d != u32::MAX)
    }

    /// A geodesic from `from` to `to`: at each step the smallest-index
    /// neighbor one step closer to `to`.
    pub fn geodesic(&self, from: usize, to: usize) -> Result<Vec<usize>> {
        let dist = self.bfs(to);
        if dist[from] == u32::MAX {
            return Err(Error::Disconnected(from));
        }
        let mut path = vec![from];
        let mut cur = from;
        while cur != to {
            cur = *self.adj[cur]
                .iter()
                .find(|&&v| dist[v] + 1 == dist[cur])
                .expect("bfs layers are consistent");
            path.push(cur);
        }
        Ok(path)
    }

    /// Shortest-path metric. Disconnected graphs are rejected.
    pub fn metric(&self) -> Result<FiniteMetricSpace> {
        let n = self.vertex_count();
        if n == 0 {
            return Err(invalid("empty graph has no metric"));
        }
        let mut dist = Vec::with_capacity(n * n);
        for s in 0..n {
            let row = self.bfs(s);
            if let Some(v) = row.iter().position(|&d| d == u32::MAX) {
                return Err(Error::Disconnected(v));
            }
            dist.extend(row.into_iter().map(f64::from));
        }
        Ok(FiniteMetricSpace::from_trusted(n, dist))
    }

    /// Cartesian (box) product; vertex `(i, j)` has index `i * other.n + j`.
    pub fn box_product(&self, other: &Self) -> Self {
        let m = other.vertex_count();
        let mut edges = Vec::new();
        for i in 0..self.vertex_count() {
            for (j, k) in other.edges() {
                edges.push((i * m + j, i * m + k));
            }
        }
        for (i, k) in self.edges() {
            for j in 0..m {
                edges.push((i * m + j, k * m + j));
            }
        }
        Self::new(self.vertex_count() * m, &edges).expect("box product of simple graphs is simple")
    }

    /// Induced subgraph on `vertices`, relabelled in the given order.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Result<Self> {
        let mut position = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in vertices.iter().enumerate() {
            if v >= self.vertex_count() {
                return Err(Error::UnknownElement(v));
            }
            position[v] = i;
        }
        let mut edges = Vec::new();
        for (i, &u) in vertices.iter().enumerate() {
            for &w in &self.adj[u] {
                let j = position[w];
                if j != usize::MAX && i < j {
                    edges.push((i, j));
                }
            }
        }
        Self::new(vertices.len(), &edges)
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            vertices: self.vertex_count(),
            edges: self.edges().into_iter().map(|(u, v)| [u, v]).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("graph serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text)?;
        file.try_into()
    }
}

impl TryFrom<GraphFile> for Graph {
    type Error = Error;

    fn try_from(file: GraphFile) -> Result<Self> {
        let edges: Vec<_> = file.edges.iter().map(|&[u, v]| (u, v)).collect();
        Graph::new(file.vertices, &edges)
    }
}
