//! Single-set regularity: `U` is `ε`-regular when every pair of disjoint
//! `A', B' ⊆ U` has `|e(A', B') - d(U)|A'||B'|| ≤ ε|U|²`, with
//! `d(U) = e(U) / C(|U|, 2)`. Disjointness makes a clique `0`-regular.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::generate::Seed;
use crate::graph::Graph;
use crate::vertex_set::VertexSet;

use super::search::Objective;
use super::RESTARTS;

/// Largest set certified exhaustively.
pub const EXACT_SINGLE_MAX: usize = 20;

#[derive(Clone, Debug, Serialize)]
pub struct RegularSubset {
    pub set: VertexSet,
    /// Largest `|e(A', B') - d|A'||B'|| / |C|²` found on the returned set.
    pub level: f64,
    /// `level ≤ ε`.
    pub certified: bool,
    /// The certifier examined every pair (`|C| ≤ 20`).
    pub exhaustive: bool,
}

fn set_density(g: &Graph, u: &VertexSet) -> f64 {
    let k = u.len();
    if k < 2 {
        return 0.0;
    }
    g.edges_within(u) as f64 / (k * (k - 1) / 2) as f64
}

/// Worst pair for `U` in either direction: `(level, A', B', exhaustive)`.
pub fn single_set_deviation(
    g: &Graph,
    u: &VertexSet,
    seed: Seed,
) -> (f64, VertexSet, VertexSet, bool) {
    let d = set_density(g, u);
    let exhaustive = u.len() <= EXACT_SINGLE_MAX;
    let mut best: Option<(f64, VertexSet, VertexSet)> = None;
    for sign in [1i8, -1] {
        let obj = Objective {
            g,
            x: u,
            y: u,
            q: &d,
            sign,
        };
        let f = if exhaustive {
            obj.exhaustive()
        } else {
            obj.heuristic(RESTARTS, seed)
        };
        if best.as_ref().map_or(true, |b| f.value > b.0) {
            best = Some((f.value, f.a, f.b));
        }
    }
    let (v, a, b) = best.expect("two directions searched");
    let area = (u.len() * u.len()) as f64;
    (v.max(0.0) / area, a, b, exhaustive)
}

/// Iterated bisection: while the certifier finds a pair above `ε`, keep the
/// half of the current set most attached to the witness side `B'`. Stops at
/// `max(4, |U| / 2^⌈4/ε²⌉)` vertices and returns the last set, uncertified.
pub fn find_regular_subset(
    g: &Graph,
    u: &VertexSet,
    eps: f64,
    seed: Seed,
) -> Result<RegularSubset> {
    if u.len() < 4 {
        return Err(Error::Precondition(format!(
            "regular subset search needs |U| >= 4, got {}",
            u.len()
        )));
    }
    if !(eps > 0.0) {
        return Err(Error::invalid("regularity tolerance must be positive"));
    }
    let halvings = (4.0 / (eps * eps)).ceil().min(63.0) as u32;
    let floor = (u.len() >> halvings).max(4);
    let mut cur = u.clone();
    loop {
        let (level, _, b, exhaustive) = single_set_deviation(g, &cur, seed);
        if level <= eps {
            return Ok(RegularSubset {
                set: cur,
                level,
                certified: true,
                exhaustive,
            });
        }
        let keep = cur.len().div_ceil(2);
        if keep < floor {
            return Ok(RegularSubset {
                set: cur,
                level,
                certified: false,
                exhaustive,
            });
        }
        let mut ranked: Vec<(usize, usize)> =
            cur.iter().map(|v| (b.count_in(g.row(v)), v)).collect();
        ranked.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
        cur = VertexSet::from_indices(g.n(), ranked[..keep].iter().map(|&(_, v)| v));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::gen_gnp;
    use crate::graph::GraphBuilder;

    #[test]
    fn clique_is_zero_regular() {
        let g = Graph::complete(12);
        let u = g.all_vertices();
        let r = find_regular_subset(&g, &u, 0.01, Seed(1)).unwrap();
        assert_eq!(r.set, u);
        assert_eq!(r.level, 0.0);
        assert!(r.certified && r.exhaustive);
    }

    #[test]
    fn two_cliques_reduce_to_one() {
        let k = 8;
        let mut gb = GraphBuilder::new(2 * k);
        for side in 0..2 {
            for u in 0..k {
                for v in u + 1..k {
                    gb.add_edge(side * k + u, side * k + v);
                }
            }
        }
        let g = gb.build();
        let r = find_regular_subset(&g, &g.all_vertices(), 0.05, Seed(1)).unwrap();
        assert!(r.certified);
        let first = r.set.iter().filter(|&v| v < k).count();
        let majority = first.max(r.set.len() - first);
        assert!(majority * 4 >= r.set.len() * 3, "{:?}", r.set);
        let (again, _, _, _) = single_set_deviation(&g, &r.set, Seed(1));
        assert!(again <= 0.05);
    }

    #[test]
    fn output_passes_own_certifier() {
        let g = gen_gnp(30, 0.5, Seed(8)).unwrap();
        let r = find_regular_subset(&g, &g.all_vertices(), 0.2, Seed(3)).unwrap();
        let (lvl, _, _, _) = single_set_deviation(&g, &r.set, Seed(3));
        assert_eq!(lvl, r.level);
        assert_eq!(r.certified, lvl <= 0.2);
        assert!(find_regular_subset(&g, &VertexSet::from_range(30, 0..3), 0.1, Seed(0)).is_err());
    }
}
