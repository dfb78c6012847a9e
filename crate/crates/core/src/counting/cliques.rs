//! Clique counts: totals, split by class, per vertex and per vertex pair.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::pattern::factorial;
use crate::scalar::Scalar;
use crate::vertex_set::{and_count, VertexSet};

use super::copies::check_capacity;
use super::matcher::iter_bits;

/// `counts[i]` = labelled `r`-cliques with exactly `i` vertices in `X` and
/// `r - i` in `Y`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassCountVector {
    pub r: usize,
    pub counts: Vec<u128>,
}

impl ClassCountVector {
    pub fn total(&self) -> u128 {
        self.counts.iter().sum()
    }

    pub fn to_scalars<T: Scalar>(&self) -> Vec<T> {
        self.counts.iter().map(|&c| T::from_count(c)).collect()
    }
}

/// Unlabelled `r`-cliques inside `s`, split by how many vertices lie in `x`.
/// Vertices are taken in increasing order so each clique is seen once.
fn unlabeled_by_class(g: &Graph, s: &VertexSet, x: &[u64], r: usize) -> Vec<u128> {
    let mut out = vec![0u128; r + 1];
    if r == 0 {
        out[0] = 1;
        return out;
    }
    if r == 1 {
        let inx = s.count_in(x);
        out[1] = inx as u128;
        out[0] = (s.len() - inx) as u128;
        return out;
    }
    let words = s.words().len();
    let firsts: Vec<usize> = s.iter().collect();
    let work = |&v: &usize| {
        let mut local = vec![0u128; r + 1];
        let mut cand = vec![0u64; words];
        for (i, c) in cand.iter_mut().enumerate() {
            *c = s.words()[i] & g.row(v)[i] & above_mask(v, i);
        }
        let k0 = usize::from(x[v / 64] >> (v % 64) & 1 == 1);
        let mut scratch = vec![vec![0u64; words]; r];
        class_rec(g, &cand, r - 1, k0, x, &mut local, &mut scratch);
        local
    };
    let parts: Vec<Vec<u128>> = if firsts.len() >= 128 && rayon::current_num_threads() > 1 {
        firsts.par_iter().map(work).collect()
    } else {
        firsts.iter().map(work).collect()
    };
    for p in parts {
        for (o, c) in out.iter_mut().zip(p) {
            *o += c;
        }
    }
    out
}

fn above_mask(v: usize, word: usize) -> u64 {
    let w = v / 64;
    if word < w {
        0
    } else if word > w {
        u64::MAX
    } else if v % 64 == 63 {
        0
    } else {
        u64::MAX << (v % 64 + 1)
    }
}

fn class_rec(
    g: &Graph,
    cand: &[u64],
    left: usize,
    k: usize,
    x: &[u64],
    out: &mut [u128],
    scratch: &mut [Vec<u64>],
) {
    if left == 1 {
        let inx = and_count(cand, x);
        let total: usize = cand.iter().map(|w| w.count_ones() as usize).sum();
        out[k + 1] += inx as u128;
        out[k] += (total - inx) as u128;
        return;
    }
    let (next, rest) = scratch.split_first_mut().expect("scratch per level");
    for v in iter_bits(cand) {
        for (i, n) in next.iter_mut().enumerate() {
            *n = cand[i] & g.row(v)[i] & above_mask(v, i);
        }
        if next.iter().all(|&w| w == 0) {
            continue;
        }
        let kv = k + usize::from(x[v / 64] >> (v % 64) & 1 == 1);
        class_rec(g, next, left - 1, kv, x, out, rest);
    }
}

/// Unlabelled `r`-cliques inside `s`.
pub fn count_cliques(g: &Graph, s: &VertexSet, r: usize) -> u128 {
    unlabeled_by_class(g, s, s.words(), r).iter().sum()
}

/// Labelled `r`-cliques in `X ∪ Y` split by the number of vertices in `X`.
pub fn count_cross_cliques(
    g: &Graph,
    x: &VertexSet,
    y: &VertexSet,
    r: usize,
) -> Result<ClassCountVector> {
    if !x.is_disjoint(y) {
        return Err(Error::invalid("cross-class sets overlap"));
    }
    check_capacity(g.n(), r)?;
    let f = factorial(r);
    let counts = unlabeled_by_class(g, &x.union(y), x.words(), r)
        .into_iter()
        .map(|c| c * f)
        .collect();
    Ok(ClassCountVector { r, counts })
}

/// `c(u, v)`: `(r-1)`-sets `S` with both `{u} ∪ S` and `{v} ∪ S` cliques.
pub fn pair_clique_count(g: &Graph, u: usize, v: usize, r: usize) -> Result<u128> {
    if u == v {
        return Err(Error::invalid("pair clique count needs distinct vertices"));
    }
    if r < 2 {
        return Err(Error::invalid("clique order must be at least 2"));
    }
    let mut common = g.neighbors(u).intersection(&g.neighbors(v));
    common.remove(u);
    common.remove(v);
    Ok(count_cliques(g, &common, r - 1))
}

/// Per-vertex clique counts `c_U(u)` and deviations `disc_U(u)` from
/// `p^{C(r,2)} |U|^{r-1} / (r-1)!`.
#[derive(Clone, Debug, Serialize)]
pub struct DiscrepancyProfile<T> {
    pub r: usize,
    pub vertices: Vec<usize>,
    pub counts: Vec<u128>,
    pub expected: T,
    pub disc: Vec<T>,
    pub total: T,
}

pub fn vertex_clique_profile<T: Scalar>(
    g: &Graph,
    u_set: &VertexSet,
    r: usize,
    p: &T,
) -> Result<DiscrepancyProfile<T>> {
    if r < 2 {
        return Err(Error::invalid("clique order must be at least 2"));
    }
    let vertices = u_set.to_vec();
    let counts: Vec<u128> = vertices
        .par_iter()
        .map(|&u| count_cliques(g, &g.neighbors(u).intersection(u_set), r - 1))
        .collect();
    let expected = p.powu((r * (r - 1) / 2) as u32) * T::of_usize(u_set.len()).powu(r as u32 - 1)
        / T::from_count(factorial(r - 1));
    let disc: Vec<T> = counts
        .iter()
        .map(|&c| (T::from_count(c) - expected.clone()).abs())
        .collect();
    let total = disc.iter().cloned().fold(T::zero(), |a, b| a + b);
    Ok(DiscrepancyProfile {
        r,
        vertices,
        counts,
        expected,
        disc,
        total,
    })
}

/// `Σ_{u,v} |d(v)^{r-1} - d(u)^{r-1}|` over ordered pairs, exact.
pub fn degree_power_discrepancy(g: &Graph, r: usize) -> Result<u128> {
    if r < 2 {
        return Err(Error::invalid("clique order must be at least 2"));
    }
    check_capacity(g.n(), r + 1)?;
    let mut powers: Vec<u128> = g
        .degrees()
        .iter()
        .map(|&d| (d as u128).pow(r as u32 - 1))
        .collect();
    powers.sort_unstable();
    // Sorted: Σ_{i<j} (a_j - a_i) = Σ_j a_j (2j - n + 1), doubled for ordered pairs.
    let n = powers.len() as i128;
    let mut total: i128 = 0;
    for (j, &a) in powers.iter().enumerate() {
        total += a as i128 * (2 * j as i128 - n + 1);
    }
    Ok(2 * total as u128)
}
