//! Small pattern graphs `H` (at most ten vertices).

use std::collections::VecDeque;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const MAX_PATTERN_VERTICES: usize = 10;

/// A pattern graph on `[0, r)` with `r ≤ 10`.
#[derive(Clone, PartialEq, Eq)]
pub struct Pattern {
    name: String,
    r: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<u16>,
    girth: Option<usize>,
}

impl Pattern {
    pub fn new(name: impl Into<String>, r: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if r == 0 || r > MAX_PATTERN_VERTICES {
            return Err(Error::invalid(format!(
                "pattern order {r} outside 1..={MAX_PATTERN_VERTICES}"
            )));
        }
        let mut adj = vec![0u16; r];
        let mut norm = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= r || v >= r {
                return Err(Error::invalid(format!("pattern edge {u}-{v} out of range")));
            }
            if u == v {
                return Err(Error::invalid(format!("pattern self-loop at {u}")));
            }
            if adj[u] >> v & 1 == 1 {
                return Err(Error::invalid(format!("duplicate pattern edge {u}-{v}")));
            }
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
            norm.push((u.min(v), u.max(v)));
        }
        norm.sort_unstable();
        let girth = shortest_cycle(r, &adj);
        Ok(Pattern {
            name: name.into(),
            r,
            edges: norm,
            adj,
            girth,
        })
    }

    pub fn from_graph(name: impl Into<String>, g: &Graph) -> Result<Self> {
        let edges: Vec<_> = g.edges().collect();
        Pattern::new(name, g.n(), &edges)
    }

    pub fn complete(r: usize) -> Self {
        let edges: Vec<_> = (0..r)
            .flat_map(|u| (u + 1..r).map(move |v| (u, v)))
            .collect();
        Pattern::new(format!("K{r}"), r, &edges).expect("valid clique")
    }

    pub fn cycle(r: usize) -> Self {
        assert!(r >= 3);
        let edges: Vec<_> = (0..r).map(|v| (v, (v + 1) % r)).collect();
        Pattern::new(format!("C{r}"), r, &edges).expect("valid cycle")
    }

    /// Path on `r` vertices.
    pub fn path(r: usize) -> Self {
        let edges: Vec<_> = (1..r).map(|v| (v - 1, v)).collect();
        Pattern::new(format!("P{r}"), r, &edges).expect("valid path")
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let edges: Vec<_> = (0..a)
            .flat_map(|u| (a..a + b).map(move |v| (u, v)))
            .collect();
        Pattern::new(format!("K{a}{b}"), a + b, &edges).expect("valid biclique")
    }

    pub fn petersen() -> Self {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Pattern::new("petersen", 10, &edges).expect("valid petersen")
    }

    /// Built-in library: `K2..K5`, `C4`, `C6`, `C8`, `K33`, `P3`/`path3`, `P4`/`path4`,
    /// `petersen`.
    pub fn by_name(name: &str) -> Option<Self> {
        let lower = name.to_ascii_lowercase();
        let p = match lower.as_str() {
            "k2" | "edge" => Pattern::complete(2),
            "k3" | "triangle" => Pattern::complete(3),
            "k4" => Pattern::complete(4),
            "k5" => Pattern::complete(5),
            "c3" => Pattern::cycle(3),
            "c4" => Pattern::cycle(4),
            "c5" => Pattern::cycle(5),
            "c6" => Pattern::cycle(6),
            "c8" => Pattern::cycle(8),
            "k33" | "k3,3" => Pattern::complete_bipartite(3, 3),
            "k22" | "k2,2" => Pattern::complete_bipartite(2, 2),
            "p3" | "path3" => Pattern::path(3),
            "p4" | "path4" => Pattern::path(4),
            "petersen" => Pattern::petersen(),
            _ => return None,
        };
        Some(p)
    }

    pub const LIBRARY: &'static [&'static str] = &[
        "K2", "K3", "K4", "K5", "C4", "C6", "C8", "K33", "P3", "P4", "petersen",
    ];

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Vertex count `r`.
    pub fn r(&self) -> usize {
        self.r
    }

    /// Edge count `m`.
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Neighbourhood of vertex `v` as a bitmask over `[0, r)`.
    pub fn neighbor_mask(&self, v: usize) -> u16 {
        self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] >> v & 1 == 1
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    /// Shortest cycle length; `None` for forests.
    pub fn girth(&self) -> Option<usize> {
        self.girth
    }

    pub fn has_isolated_vertex(&self) -> bool {
        self.adj.iter().any(|&a| a == 0)
    }

    pub fn is_clique(&self) -> bool {
        self.m() == self.r * (self.r - 1) / 2
    }

    pub fn to_graph(&self) -> Graph {
        Graph::from_edges(self.r, &self.edges).expect("pattern edges are valid")
    }

    /// Automorphism count by brute force over all `r!` permutations.
    pub fn automorphism_count(&self) -> u64 {
        let mut count = 0;
        for_each_permutation(self.r, |perm| {
            if self
                .edges
                .iter()
                .all(|&(u, v)| self.has_edge(perm[u], perm[v]))
            {
                count += 1;
            }
        });
        count
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Pattern({}, r={}, edges={:?})",
            self.name, self.r, self.edges
        )
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl Serialize for Pattern {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.name)
    }
}

fn shortest_cycle(r: usize, adj: &[u16]) -> Option<usize> {
    // BFS from every vertex; a non-tree edge closes a cycle of length
    // dist(u) + dist(v) + 1, and the minimum over all roots is the girth.
    let mut best: Option<usize> = None;
    for root in 0..r {
        let mut dist = vec![usize::MAX; r];
        let mut parent = vec![usize::MAX; r];
        dist[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for v in 0..r {
                if adj[u] >> v & 1 == 0 {
                    continue;
                }
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    parent[v] = u;
                    queue.push_back(v);
                } else if parent[u] != v {
                    let len = dist[u] + dist[v] + 1;
                    best = Some(best.map_or(len, |b| b.min(len)));
                }
            }
        }
    }
    best
}

/// Calls `f` on every permutation of `[0, k)` (Heap's algorithm).
pub fn for_each_permutation(k: usize, mut f: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..k).collect();
    let mut c = vec![0usize; k];
    f(&perm);
    let mut i = 0;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            f(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

pub fn factorial(k: usize) -> u128 {
    (1..=k as u128).product()
}
