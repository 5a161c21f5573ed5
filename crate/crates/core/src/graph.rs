//! Undirected simple graphs and the seeded G(n, p) generator.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Undirected simple graph. Edges are stored as `(u, v)` with `u < v`, sorted
/// lexicographically, which fixes the Hamiltonian term order downstream.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph")]
pub struct Graph {
    n_nodes: usize,
    edges: Vec<(usize, usize)>,
}

#[derive(Deserialize)]
struct RawGraph {
    n_nodes: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<RawGraph> for Graph {
    type Error = Error;

    fn try_from(raw: RawGraph) -> Result<Self> {
        Graph::new(raw.n_nodes, raw.edges)
    }
}

impl Graph {
    /// Normalizes each edge to `u < v` and sorts; rejects self-loops,
    /// duplicates and out-of-range endpoints.
    pub fn new(n_nodes: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut norm = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidGraph(alloc::format!("self-loop at node {a}")));
            }
            if a >= n_nodes || b >= n_nodes {
                return Err(Error::InvalidGraph(alloc::format!(
                    "edge ({a}, {b}) out of range for {n_nodes} nodes"
                )));
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        if let Some(w) = norm.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(alloc::format!(
                "duplicate edge ({}, {})",
                w[0].0,
                w[0].1
            )));
        }
        Ok(Graph {
            n_nodes,
            edges: norm,
        })
    }

    pub fn empty(n_nodes: usize) -> Self {
        Graph {
            n_nodes,
            edges: Vec::new(),
        }
    }

    pub fn complete(n_nodes: usize) -> Self {
        let edges = (0..n_nodes)
            .flat_map(|u| (u + 1..n_nodes).map(move |v| (u, v)))
            .collect();
        Graph { n_nodes, edges }
    }

    pub fn path(n_nodes: usize) -> Self {
        let edges = (1..n_nodes).map(|v| (v - 1, v)).collect();
        Graph { n_nodes, edges }
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Row-major 0/1 adjacency matrix.
    pub fn adjacency_rows(&self) -> Vec<Vec<f64>> {
        let mut rows = alloc::vec![alloc::vec![0.0; self.n_nodes]; self.n_nodes];
        for &(u, v) in &self.edges {
            rows[u][v] = 1.0;
            rows[v][u] = 1.0;
        }
        rows
    }

    /// Breadth-first order starting at node 0, visiting neighbors in
    /// increasing order. Unreached components are continued from their
    /// smallest node, so every node appears exactly once.
    pub fn bfs_order(&self) -> Vec<usize> {
        let adj: Vec<Vec<usize>> = (0..self.n_nodes).map(|v| self.neighbors(v)).collect();
        let mut seen = alloc::vec![false; self.n_nodes];
        let mut order = Vec::with_capacity(self.n_nodes);
        for root in 0..self.n_nodes {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                order.push(v);
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        order
    }

    pub fn is_connected(&self) -> bool {
        if self.n_nodes == 0 {
            return true;
        }
        let adj: Vec<Vec<usize>> = (0..self.n_nodes).map(|v| self.neighbors(v)).collect();
        let mut seen = alloc::vec![false; self.n_nodes];
        let mut stack = alloc::vec![0];
        seen[0] = true;
        let mut reached = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        reached == self.n_nodes
    }

    /// Number of edges whose endpoints take different values in `side`.
    pub fn cut_size(&self, side: impl Fn(usize) -> bool) -> usize {
        self.edges.iter().filter(|&&(u, v)| side(u) != side(v)).count()
    }
}

/// Erdős–Rényi–Gilbert G(n, p).
///
/// Pairs `(u, v)` with `u < v` are visited in lexicographic order and each is
/// kept when a uniform draw in `[0, 1)` falls below `p`. Draws come from
/// ChaCha8 seeded with `seed` via `SeedableRng::seed_from_u64`, so the same
/// `(n, p, seed)` yields the same graph on every platform.
pub fn gnp_random_graph(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidArgument("G(n, p) needs n >= 1".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(alloc::format!(
            "edge probability {p} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph { n_nodes: n, edges })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gnp_extremes_and_determinism() {
        assert_eq!(gnp_random_graph(4, 0.0, 9).unwrap().n_edges(), 0);
        assert_eq!(gnp_random_graph(4, 1.0, 9).unwrap().n_edges(), 6);
        let a = gnp_random_graph(8, 0.5, 42).unwrap();
        let b = gnp_random_graph(8, 0.5, 42).unwrap();
        assert_eq!(a, b);
        assert!(gnp_random_graph(8, 1.5, 0).is_err());
        assert!(gnp_random_graph(0, 0.5, 0).is_err());
    }

    #[test]
    fn gnp_is_stable_across_builds() {
        // Frozen output of the documented generator.
        let g = gnp_random_graph(6, 0.5, 7).unwrap();
        assert_eq!(
            g.edges(),
            &[(0, 1), (0, 2), (1, 2), (1, 3), (1, 5), (2, 4), (2, 5), (3, 5), (4, 5)]
        );
    }

    #[test]
    fn normalization_and_rejections() {
        let g = Graph::new(3, [(2, 0), (1, 0)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 2)]);
        assert!(Graph::new(3, [(1, 1)]).is_err());
        assert!(Graph::new(3, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(3, [(0, 3)]).is_err());
    }

    #[test]
    fn bfs_and_connectivity() {
        let g = Graph::new(4, [(0, 2), (2, 3), (3, 1)]).unwrap();
        assert_eq!(g.bfs_order(), alloc::vec![0, 2, 3, 1]);
        assert!(g.is_connected());
        let h = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert!(!h.is_connected());
        assert_eq!(h.bfs_order(), alloc::vec![0, 1, 2, 3]);
    }
}
