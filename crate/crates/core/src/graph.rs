//! Undirected simple graphs with bitset adjacency rows.

use crate::error::{Error, Result};
use crate::vertex_set::{and_count, words_for, VertexSet};

/// Simple undirected graph on `[0, n)`.
///
/// Row `v` is a bitset of `ceil(n/64)` words; neighbourhood intersection is the
/// primitive every counter builds on.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    words: usize,
    adj: Vec<u64>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        let words = words_for(n);
        Graph {
            n,
            words,
            adj: vec![0; n * words],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut b = GraphBuilder::new(n);
        for u in 0..n {
            for v in u + 1..n {
                b.add_edge(u, v);
            }
        }
        b.build()
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let mut g = GraphBuilder::new(a + b);
        for u in 0..a {
            for v in a..a + b {
                g.add_edge(u, v);
            }
        }
        g.build()
    }

    pub fn cycle(n: usize) -> Self {
        let mut b = GraphBuilder::new(n);
        for v in 0..n {
            b.add_edge(v, (v + 1) % n);
        }
        b.build()
    }

    pub fn path(n: usize) -> Self {
        let mut b = GraphBuilder::new(n);
        for v in 1..n {
            b.add_edge(v - 1, v);
        }
        b.build()
    }

    /// Builds a graph from an edge list, rejecting loops, duplicates and
    /// out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut b = GraphBuilder::new(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!(
                    "edge {u}-{v} out of range for n = {n}"
                )));
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop at {u}")));
            }
            if b.has_edge(u, v) {
                return Err(Error::invalid(format!("duplicate edge {u}-{v}")));
            }
            b.add_edge(u, v);
        }
        Ok(b.build())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        &self.adj[v * self.words..(v + 1) * self.words]
    }

    pub fn neighbors(&self, v: usize) -> VertexSet {
        VertexSet::from_words(self.n, self.row(v).to_vec())
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.row(u)[v / 64] >> (v % 64) & 1 == 1
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    /// Neighbours of `v` inside `s`.
    pub fn degree_into(&self, v: usize, s: &VertexSet) -> usize {
        s.count_in(self.row(v))
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| {
            let row = self.row(u);
            VertexSetRowIter::new(row, u + 1).map(move |v| (u, v))
        })
    }

    /// `e(S)`: unordered edges with both ends in `s`.
    pub fn edges_within(&self, s: &VertexSet) -> usize {
        self.edges_between(s, s) / 2
    }

    /// `e(S, T) = Σ_{s∈S, t∈T} 1_G(s,t)`: ordered pairs, overlaps allowed.
    pub fn edges_between(&self, s: &VertexSet, t: &VertexSet) -> usize {
        s.iter().map(|v| and_count(self.row(v), t.words())).sum()
    }

    /// Induced subgraph on `s`, relabelled to `[0, |s|)` in increasing order.
    pub fn induced_subgraph(&self, s: &VertexSet) -> Graph {
        let verts = s.to_vec();
        let mut b = GraphBuilder::new(verts.len());
        for (i, &u) in verts.iter().enumerate() {
            for (j, &v) in verts.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    b.add_edge(i, j);
                }
            }
        }
        b.build()
    }

    /// Checks symmetry and irreflexivity of the adjacency rows.
    pub fn is_well_formed(&self) -> bool {
        for u in 0..self.n {
            if self.has_edge(u, u) {
                return false;
            }
            for v in VertexSetRowIter::new(self.row(u), 0) {
                if v >= self.n || !self.has_edge(v, u) {
                    return false;
                }
            }
        }
        true
    }

    pub fn all_vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Graph(n={}, edges={:?})",
            self.n,
            self.edges().collect::<Vec<_>>()
        )
    }
}

struct VertexSetRowIter<'a> {
    row: &'a [u64],
    idx: usize,
    cur: u64,
}

impl<'a> VertexSetRowIter<'a> {
    fn new(row: &'a [u64], from: usize) -> Self {
        let idx = from / 64;
        let cur = if idx < row.len() {
            row[idx] & (u64::MAX << (from % 64))
        } else {
            0
        };
        VertexSetRowIter { row, idx, cur }
    }
}

impl Iterator for VertexSetRowIter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let b = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * 64 + b);
            }
            self.idx += 1;
            if self.idx >= self.row.len() {
                return None;
            }
            self.cur = self.row[self.idx];
        }
    }
}

/// Mutable staging area; [`Graph`] itself is immutable once built.
pub struct GraphBuilder {
    g: Graph,
}

impl GraphBuilder {
    pub fn new(n: usize) -> Self {
        GraphBuilder { g: Graph::empty(n) }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v && u < self.g.n && v < self.g.n);
        let w = self.g.words;
        self.g.adj[u * w + v / 64] |= 1u64 << (v % 64);
        self.g.adj[v * w + u / 64] |= 1u64 << (u % 64);
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.g.has_edge(u, v)
    }

    pub fn build(self) -> Graph {
        self.g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_counts() {
        let k5 = Graph::complete(5);
        assert_eq!(k5.edge_count(), 10);
        assert!(k5.is_well_formed());
        assert_eq!(k5.degrees(), vec![4; 5]);
    }

    #[test]
    fn induced_subgraph_of_clique_is_clique() {
        let k5 = Graph::complete(5);
        let s = VertexSet::from_indices(5, [0, 2, 4]);
        assert_eq!(k5.induced_subgraph(&s), Graph::complete(3));
        assert_eq!(k5.induced_subgraph(&k5.all_vertices()), k5);
    }

    #[test]
    fn edge_counts_between_sets() {
        let g = Graph::path(3);
        let all = g.all_vertices();
        assert_eq!(g.edges_between(&all, &all), 4);
        assert_eq!(g.edges_within(&all), 2);
        let a = VertexSet::from_indices(3, [0]);
        let b = VertexSet::from_indices(3, [1, 2]);
        assert_eq!(g.edges_between(&a, &b), 1);
    }

    #[test]
    fn from_edges_rejects_bad_input() {
        assert!(Graph::from_edges(3, &[(0, 0)]).is_err());
        assert!(Graph::from_edges(3, &[(0, 3)]).is_err());
        assert!(Graph::from_edges(3, &[(0, 1), (1, 0)]).is_err());
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(g, Graph::path(3));
    }

    #[test]
    fn edges_iterates_across_word_boundary() {
        let g = Graph::from_edges(130, &[(0, 129), (63, 64), (64, 65)]).unwrap();
        assert_eq!(
            g.edges().collect::<Vec<_>>(),
            vec![(0, 129), (63, 64), (64, 65)]
        );
    }
}
