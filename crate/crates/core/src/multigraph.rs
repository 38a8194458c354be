//! Finite multigraphs as directed edges with a fixed-point-free inversion,
//! plus Laplacians, connectivity and spanning-tree counts.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::linalg::{bareiss_determinant, to_big};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DirectedEdge {
    pub origin: usize,
    pub terminus: usize,
}

/// A multigraph: `edges[e]` runs from `origin` to `terminus` and
/// `inversion[e]` is the same undirected edge traversed backwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    vertex_count: usize,
    edges: Vec<DirectedEdge>,
    inversion: Vec<usize>,
}

impl Multigraph {
    pub fn new(vertex_count: usize, edges: Vec<DirectedEdge>, inversion: Vec<usize>) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::InvalidGraph("a graph needs at least one vertex".into()));
        }
        if edges.len() != inversion.len() {
            return Err(Error::InvalidGraph("inversion must pair every directed edge".into()));
        }
        for (id, e) in edges.iter().enumerate() {
            if e.origin >= vertex_count || e.terminus >= vertex_count {
                return Err(Error::InvalidGraph(format!("edge {id} has an endpoint out of range")));
            }
            let inv = inversion[id];
            if inv >= edges.len() || inv == id || inversion[inv] != id {
                return Err(Error::InvalidGraph(format!("inversion is not a fixed-point-free involution at edge {id}")));
            }
            let back = edges[inv];
            if back.origin != e.terminus || back.terminus != e.origin {
                return Err(Error::InvalidGraph(format!("edge {id} and its inverse are not incident-compatible")));
            }
        }
        Ok(Multigraph { vertex_count, edges, inversion })
    }

    /// Builds a graph from undirected edges listed once each. Edge `k`
    /// becomes the directed pair `2k: i → j` and `2k+1: j → i`.
    pub fn from_undirected(vertex_count: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut edges = Vec::with_capacity(2 * pairs.len());
        let mut inversion = Vec::with_capacity(2 * pairs.len());
        for (k, &(i, j)) in pairs.iter().enumerate() {
            edges.push(DirectedEdge { origin: i, terminus: j });
            edges.push(DirectedEdge { origin: j, terminus: i });
            inversion.push(2 * k + 1);
            inversion.push(2 * k);
        }
        Multigraph::new(vertex_count, edges, inversion)
    }

    /// The single-vertex graph with `t` loops.
    pub fn bouquet(t: usize) -> Self {
        Multigraph::from_undirected(1, &vec![(0, 0); t]).expect("bouquet is well formed")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn directed_edges(&self) -> &[DirectedEdge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> DirectedEdge {
        self.edges[id]
    }

    pub fn inverse(&self, id: usize) -> usize {
        self.inversion[id]
    }

    pub fn undirected_edge_count(&self) -> usize {
        self.edges.len() / 2
    }

    /// One directed edge per undirected class (the smaller id), in id order.
    /// Position in this list is the undirected edge index used throughout.
    pub fn canonical_section(&self) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| e < self.inversion[e]).collect()
    }

    /// Undirected edges as vertex pairs, in canonical section order.
    pub fn undirected_edges(&self) -> Vec<(usize, usize)> {
        self.canonical_section()
            .into_iter()
            .map(|e| (self.edges[e].origin, self.edges[e].terminus))
            .collect()
    }

    /// Number of undirected edges joining `i` and `j` (loops when i == j).
    pub fn multiplicity(&self, i: usize, j: usize) -> usize {
        self.canonical_section()
            .into_iter()
            .filter(|&e| {
                let d = self.edges[e];
                (d.origin == i && d.terminus == j) || (d.origin == j && d.terminus == i)
            })
            .count()
    }

    /// Out-degree, with each loop counted twice.
    pub fn valency(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.origin == v).count()
    }

    /// A[i][j] = number of directed edges from i to j.
    pub fn adjacency(&self) -> Vec<Vec<i64>> {
        let u = self.vertex_count;
        let mut a = vec![vec![0i64; u]; u];
        for e in &self.edges {
            a[e.origin][e.terminus] += 1;
        }
        a
    }

    /// Q = D − A.
    pub fn laplacian(&self) -> Vec<Vec<i64>> {
        let mut q = self.adjacency();
        for row in q.iter_mut() {
            for x in row.iter_mut() {
                *x = -*x;
            }
        }
        for e in &self.edges {
            q[e.origin][e.origin] += 1;
        }
        q
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.vertex_count];
        let adj = self.neighbour_lists();
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &(_, w) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.vertex_count
    }

    /// χ = |V| − |E| with undirected edges.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.undirected_edge_count() as i64
    }

    /// Number of spanning trees: the (0,0) cofactor of the Laplacian.
    pub fn spanning_tree_count(&self) -> Result<BigInt> {
        if !self.is_connected() {
            return Err(Error::DisconnectedGraph);
        }
        let q = self.laplacian();
        if q.len() == 1 {
            return Ok(BigInt::one());
        }
        let minor: Vec<Vec<i64>> = q[1..].iter().map(|row| row[1..].to_vec()).collect();
        Ok(bareiss_determinant(to_big(&minor)))
    }

    /// The spanning tree found by breadth-first search from vertex 0,
    /// scanning edges in canonical section order.
    pub fn bfs_tree(&self) -> Result<SpanningTree> {
        if !self.is_connected() {
            return Err(Error::DisconnectedGraph);
        }
        let adj = self.neighbour_lists();
        let mut seen = vec![false; self.vertex_count];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        let mut tree = Vec::with_capacity(self.vertex_count - 1);
        while let Some(v) = queue.pop_front() {
            for &(k, w) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    tree.push(k);
                    queue.push_back(w);
                }
            }
        }
        tree.sort_unstable();
        Ok(SpanningTree { edges: tree })
    }

    /// For each vertex, (undirected index, neighbour) in index order.
    fn neighbour_lists(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for (k, (i, j)) in self.undirected_edges().into_iter().enumerate() {
            adj[i].push((k, j));
            if i != j {
                adj[j].push((k, i));
            }
        }
        adj
    }
}

/// A spanning tree, stored as sorted undirected edge indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    edges: Vec<usize>,
}

impl SpanningTree {
    pub fn new(g: &Multigraph, mut edges: Vec<usize>) -> Result<Self> {
        edges.sort_unstable();
        edges.dedup();
        let u = g.vertex_count();
        if edges.len() + 1 != u {
            return Err(Error::InvalidGraph(format!("a spanning tree on {u} vertices needs {} edges", u - 1)));
        }
        let pairs = g.undirected_edges();
        let mut uf = UnionFind::new(u);
        for &k in &edges {
            let Some(&(i, j)) = pairs.get(k) else {
                return Err(Error::InvalidGraph(format!("tree edge {k} does not exist")));
            };
            if !uf.union(i, j) {
                return Err(Error::InvalidGraph(format!("tree edges contain a cycle at edge {k}")));
            }
        }
        Ok(SpanningTree { edges })
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn contains(&self, k: usize) -> bool {
        self.edges.binary_search(&k).is_ok()
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when x and y were already joined.
    pub(crate) fn union(&mut self, x: usize, y: usize) -> bool {
        let (a, b) = (self.find(x), self.find(y));
        if a == b {
            return false;
        }
        self.parent[a] = b;
        true
    }
}
