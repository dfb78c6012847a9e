//! Counting on graphs with at most 64 vertices, sets as `u64` masks.
//! Used by the exhaustive enumerations, where per-subset cost dominates.

use crate::graph::Graph;
use crate::pattern::Pattern;

pub(crate) struct MaskGraph {
    pub adj: Vec<u64>,
}

impl MaskGraph {
    pub fn new(g: &Graph) -> Self {
        assert!(g.n() <= 64);
        MaskGraph {
            adj: (0..g.n())
                .map(|v| g.row(v).first().copied().unwrap_or(0))
                .collect(),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum Shape {
    Edge,
    Triangle,
    General,
}

/// Pattern prepared for repeated counting: one placement order per forced
/// first vertex, with back-edges by position.
pub(crate) struct MaskPattern {
    pub shape: Shape,
    pub r: usize,
    free: Plan,
    pinned: Vec<Plan>,
}

struct Plan {
    order: Vec<usize>,
    back: Vec<Vec<usize>>,
}

impl Plan {
    fn new(h: &Pattern, first: Option<usize>) -> Self {
        let order = crate::counting::placement_order(h, first);
        let back = order
            .iter()
            .enumerate()
            .map(|(k, &v)| (0..k).filter(|&j| h.has_edge(order[j], v)).collect())
            .collect();
        Plan { order, back }
    }
}

impl MaskPattern {
    pub fn shape_of(h: &Pattern) -> Shape {
        match (h.r(), h.m()) {
            (2, 1) => Shape::Edge,
            (3, 3) => Shape::Triangle,
            _ => Shape::General,
        }
    }

    pub fn new(h: &Pattern) -> Self {
        MaskPattern {
            shape: Self::shape_of(h),
            r: h.r(),
            free: Plan::new(h, None),
            pinned: (0..h.r()).map(|i| Plan::new(h, Some(i))).collect(),
        }
    }

    /// Labelled copies inside `s`.
    pub fn count(&self, g: &MaskGraph, s: u64) -> u128 {
        match self.shape {
            Shape::Edge => {
                let mut t = 0u128;
                let mut rest = s;
                while rest != 0 {
                    let v = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    t += (g.adj[v] & s).count_ones() as u128;
                }
                t
            }
            _ => {
                let doms = [s; 10];
                dfs(
                    g,
                    &self.free.back,
                    &doms[..self.r],
                    0,
                    &mut [0; 10],
                    0,
                    true,
                )
            }
        }
    }

    /// Labelled copies inside `s ∪ {v}` using `v`; `v ∉ s`.
    pub fn through(&self, g: &MaskGraph, s: u64, v: usize) -> u128 {
        let nv = g.adj[v] & s;
        match self.shape {
            Shape::Edge => 2 * nv.count_ones() as u128,
            Shape::Triangle => {
                let mut t = 0u128;
                let mut rest = nv;
                while rest != 0 {
                    let u = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    t += (g.adj[u] & nv).count_ones() as u128;
                }
                3 * t
            }
            Shape::General => {
                let dom = s | 1 << v;
                let doms = [dom; 10];
                self.pinned
                    .iter()
                    .map(|plan| {
                        let mut assigned = [0usize; 10];
                        assigned[0] = v;
                        dfs(
                            g,
                            &plan.back,
                            &doms[..self.r],
                            1,
                            &mut assigned,
                            1 << v,
                            true,
                        )
                    })
                    .sum()
            }
        }
    }

    /// Copies with pattern vertex `x` in `parts[pi[x]]`; parts are disjoint.
    pub fn ordered(&self, g: &MaskGraph, parts: &[u64], pi: &[usize]) -> u128 {
        let mut doms = [0u64; 10];
        for (k, &x) in self.free.order.iter().enumerate() {
            doms[k] = parts[pi[x]];
        }
        dfs(
            g,
            &self.free.back,
            &doms[..self.r],
            0,
            &mut [0; 10],
            0,
            false,
        )
    }
}

/// `doms` are indexed by position in the plan's order.
fn dfs(
    g: &MaskGraph,
    back: &[Vec<usize>],
    doms: &[u64],
    pos: usize,
    assigned: &mut [usize; 10],
    used: u64,
    injective: bool,
) -> u128 {
    let mut cand = doms[pos];
    for &j in &back[pos] {
        cand &= g.adj[assigned[j]];
    }
    if injective {
        cand &= !used;
    }
    if pos + 1 == doms.len() {
        return cand.count_ones() as u128;
    }
    let mut total = 0;
    while cand != 0 {
        let v = cand.trailing_zeros() as usize;
        cand &= cand - 1;
        assigned[pos] = v;
        total += dfs(g, back, doms, pos + 1, assigned, used | 1 << v, injective);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::{count_copies_through, count_labeled_copies, count_partite, PartiteMode};
    use crate::generate::{gen_gnp, Seed};
    use crate::vertex_set::VertexSet;

    #[test]
    fn agrees_with_general_counters() {
        let g = gen_gnp(20, 0.5, Seed(6)).unwrap();
        let mg = MaskGraph::new(&g);
        let s = 0b1011_0110_1110_1011_0101u64;
        let set = VertexSet::from_mask(20, s);
        for h in [
            Pattern::complete(2),
            Pattern::complete(3),
            Pattern::cycle(4),
            Pattern::path(3),
            Pattern::complete(4),
        ] {
            let mp = MaskPattern::new(&h);
            assert_eq!(
                mp.count(&mg, s),
                count_labeled_copies(&h, &g, &set).unwrap(),
                "{h}"
            );
            for v in [1usize, 3, 6] {
                assert!(s >> v & 1 == 0);
                assert_eq!(
                    mp.through(&mg, s, v),
                    count_copies_through(&h, &g, &set, v),
                    "{h} {v}"
                );
            }
        }
        let h = Pattern::path(3);
        let parts = [0b111u64, 0b111000, 0b1111000000];
        let sets: Vec<_> = parts.iter().map(|&m| VertexSet::from_mask(20, m)).collect();
        let pi = [2, 0, 1];
        let mp = MaskPattern::new(&h);
        assert_eq!(
            mp.ordered(&mg, &parts, &pi),
            count_partite(&h, &g, &sets, &PartiteMode::Ordered(pi.to_vec())).unwrap()
        );
    }
}
