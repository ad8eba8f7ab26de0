//! Simple undirected graphs on `0..n`.
//!
//! Vertices are 0-based inside the library. File formats and error messages
//! use 1-based ids.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// An undirected edge stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
}

impl Edge {
    /// Canonical edge between two distinct vertices.
    pub fn new(a: usize, b: usize) -> Self {
        debug_assert_ne!(a, b);
        if a < b {
            Edge { u: a, v: b }
        } else {
            Edge { u: b, v: a }
        }
    }

    pub fn contains(&self, x: usize) -> bool {
        self.u == x || self.v == x
    }

    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.u + 1, self.v + 1)
    }
}

/// The host graph `H`. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from 0-based vertex pairs. Reversed and repeated pairs
    /// collapse onto one canonical edge.
    pub fn new(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut edges = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            for x in [a, b] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x + 1, n });
                }
            }
            if a == b {
                return Err(Error::Loop(a + 1));
            }
            edges.push(Edge::new(a, b));
        }
        edges.sort_unstable();
        edges.dedup();
        let mut adjacency = vec![Vec::new(); n];
        for e in &edges {
            adjacency[e.u].push(e.v);
            adjacency[e.v].push(e.u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Graph {
            n,
            edges,
            adjacency,
        })
    }

    /// Builds a graph from 1-based vertex pairs, as they appear in files.
    pub fn from_one_based(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut zero = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            for x in [a, b] {
                if x == 0 || x > n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            zero.push((a - 1, b - 1));
        }
        Graph::new(n, &zero)
    }

    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            edges: Vec::new(),
            adjacency: vec![Vec::new(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Edges in canonical (lexicographic) order. The position of an edge in
    /// this slice is its edge id.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> Edge {
        self.edges[id]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a != b && a < self.n && b < self.n && self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Id of edge `{a, b}`, if present.
    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        if a == b {
            return None;
        }
        self.edges.binary_search(&Edge::new(a, b)).ok()
    }

    /// The subgraph induced by `vertices`, relabelled onto `0..|vertices|` in
    /// ascending order of original id.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Result<InducedSubgraph> {
        let mut original: Vec<usize> = vertices.to_vec();
        original.sort_unstable();
        original.dedup();
        if let Some(&bad) = original.iter().find(|&&x| x >= self.n) {
            return Err(Error::VertexOutOfRange {
                vertex: bad + 1,
                n: self.n,
            });
        }
        let mut local = vec![usize::MAX; self.n];
        for (i, &x) in original.iter().enumerate() {
            local[x] = i;
        }
        let pairs: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter(|e| local[e.u] != usize::MAX && local[e.v] != usize::MAX)
            .map(|e| (local[e.u], local[e.v]))
            .collect();
        let graph = Graph::new(original.len(), &pairs)?;
        Ok(InducedSubgraph { graph, original })
    }

    /// Edge ids of `H[vertices]`, ascending.
    pub fn induced_edge_ids(&self, vertices: &[usize]) -> Vec<usize> {
        let mut ids = Vec::new();
        for &a in vertices {
            for &b in &self.adjacency[a] {
                if a < b && vertices.contains(&b) {
                    ids.push(self.edge_id(a, b).expect("adjacent pair has an id"));
                }
            }
        }
        ids.sort_unstable();
        ids
    }
}

/// `H[S]` together with the map from local to original vertex ids.
#[derive(Debug, Clone)]
pub struct InducedSubgraph {
    pub graph: Graph,
    pub original: Vec<usize>,
}

/// A spanning subgraph `G ⊆ H`: all vertices of the host, a subset of its edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph<'g> {
    host: &'g Graph,
    chosen: Vec<usize>,
}

impl<'g> Subgraph<'g> {
    pub fn empty(host: &'g Graph) -> Self {
        Subgraph {
            host,
            chosen: Vec::new(),
        }
    }

    /// Subgraph from host edge ids. Ids are sorted and deduplicated.
    pub fn from_edge_ids(host: &'g Graph, ids: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut chosen: Vec<usize> = ids.into_iter().collect();
        chosen.sort_unstable();
        chosen.dedup();
        if let Some(&bad) = chosen.last().filter(|&&id| id >= host.m()) {
            return Err(Error::Internal(format!("edge id {bad} not in host")));
        }
        Ok(Subgraph { host, chosen })
    }

    /// Subgraph from explicit edges, all of which must belong to the host.
    pub fn from_edges(host: &'g Graph, edges: &[Edge]) -> Result<Self> {
        let mut ids = Vec::with_capacity(edges.len());
        for e in edges {
            match host.edge_id(e.u, e.v) {
                Some(id) => ids.push(id),
                None => {
                    return Err(Error::Params(format!("edge {e} is not an edge of the host")));
                }
            }
        }
        Subgraph::from_edge_ids(host, ids)
    }

    pub fn host(&self) -> &'g Graph {
        self.host
    }

    pub fn edge_ids(&self) -> &[usize] {
        &self.chosen
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.chosen.iter().map(|&id| self.host.edge(id))
    }

    pub fn len(&self) -> usize {
        self.chosen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chosen.is_empty()
    }

    /// `d_i(G)` for every vertex.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.host.n()];
        for e in self.edges() {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        deg
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn triangle() -> Graph {
        Graph::from_one_based(3, &[(1, 2), (2, 3), (1, 3)]).unwrap()
    }

    fn path3() -> Graph {
        Graph::from_one_based(3, &[(1, 2), (2, 3)]).unwrap()
    }

    #[test]
    fn builds_triangle() {
        let g = triangle();
        assert_eq!(g.m(), 3);
        assert_eq!(g.neighbors(0), &[1, 2]);
    }

    #[test]
    fn rejects_loops_and_range() {
        assert_eq!(Graph::from_one_based(2, &[(1, 1)]), Err(Error::Loop(1)));
        assert_eq!(
            Graph::from_one_based(2, &[(1, 3)]),
            Err(Error::VertexOutOfRange { vertex: 3, n: 2 })
        );
        assert!(Graph::from_one_based(2, &[(0, 1)]).is_err());
    }

    #[test]
    fn reversed_pair_dedups() {
        let g = Graph::from_one_based(4, &[(1, 2), (2, 1)]).unwrap();
        assert_eq!(g.edges(), &[Edge::new(0, 1)]);
        assert_eq!(g.degree(0), 1);
    }

    #[test]
    fn induced_examples() {
        let g = triangle();
        let h = g.induced_subgraph(&[0, 1]).unwrap();
        assert_eq!(h.graph.edges(), &[Edge::new(0, 1)]);

        let h = g.induced_subgraph(&[]).unwrap();
        assert_eq!((h.graph.n(), h.graph.m()), (0, 0));

        let h = path3().induced_subgraph(&[0, 2]).unwrap();
        assert_eq!((h.graph.n(), h.graph.m()), (2, 0));
        assert_eq!(h.original, vec![0, 2]);

        assert!(g.induced_subgraph(&[3]).is_err());
    }

    #[test]
    fn degree_examples() {
        let g = triangle();
        let all = Subgraph::from_edge_ids(&g, 0..3).unwrap();
        assert_eq!(all.degrees(), vec![2, 2, 2]);
        assert_eq!(Subgraph::empty(&g).degrees(), vec![0, 0, 0]);

        let p = path3();
        let s = Subgraph::from_edges(&p, &[Edge::new(0, 1)]).unwrap();
        assert_eq!(s.degrees(), vec![1, 1, 0]);
        assert!(Subgraph::from_edges(&p, &[Edge::new(0, 2)]).is_err());
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (1usize..12).prop_flat_map(|n| {
            proptest::collection::vec((0..n, 0..n), 0..40).prop_map(move |pairs| {
                let pairs: Vec<_> = pairs.into_iter().filter(|(a, b)| a != b).collect();
                Graph::new(n, &pairs).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn adjacency_matches_edges(g in arb_graph()) {
            for v in 0..g.n() {
                let count = g.edges().iter().filter(|e| e.contains(v)).count();
                prop_assert_eq!(g.degree(v), count);
                for &w in g.neighbors(v) {
                    prop_assert!(g.neighbors(w).contains(&v));
                }
            }
        }

        #[test]
        fn induced_is_identity_on_all_and_monotone(g in arb_graph(), mask in any::<u16>()) {
            let all: Vec<usize> = (0..g.n()).collect();
            prop_assert_eq!(&g.induced_subgraph(&all).unwrap().graph, &g);
            let s: Vec<usize> = (0..g.n()).filter(|i| mask >> i & 1 == 1).collect();
            let small = g.induced_edge_ids(&s);
            let big = g.induced_edge_ids(&all);
            prop_assert!(small.iter().all(|id| big.contains(id)));
            let h = g.induced_subgraph(&s).unwrap();
            prop_assert_eq!(h.graph.m(), small.len());
        }

        #[test]
        fn handshake(g in arb_graph(), mask in any::<u64>()) {
            let ids = (0..g.m()).filter(|&i| i < 64 && mask >> i & 1 == 1);
            let s = Subgraph::from_edge_ids(&g, ids).unwrap();
            prop_assert_eq!(s.degrees().iter().sum::<usize>(), 2 * s.len());
        }
    }
}
