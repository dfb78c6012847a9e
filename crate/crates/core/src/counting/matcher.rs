//! Ordered DFS over pattern vertices with bitset candidate sets.

use rayon::prelude::*;

use crate::graph::Graph;
use crate::pattern::Pattern;

/// Outer-loop size above which the first level is split across threads.
const PAR_THRESHOLD: usize = 96;

/// Placement order: optionally a forced first vertex, then repeatedly the vertex
/// with the most already-placed neighbours (ties: higher degree, lower index).
pub(crate) fn placement_order(h: &Pattern, first: Option<usize>) -> Vec<usize> {
    let r = h.r();
    let mut order = Vec::with_capacity(r);
    let mut placed = 0u16;
    if let Some(f) = first {
        order.push(f);
        placed |= 1 << f;
    }
    while order.len() < r {
        let next = (0..r)
            .filter(|&v| placed >> v & 1 == 0)
            .max_by(|&a, &b| {
                let ka = (h.neighbor_mask(a) & placed).count_ones();
                let kb = (h.neighbor_mask(b) & placed).count_ones();
                ka.cmp(&kb)
                    .then(h.degree(a).cmp(&h.degree(b)))
                    .then(b.cmp(&a))
            })
            .expect("unplaced vertex");
        order.push(next);
        placed |= 1 << next;
    }
    order
}

pub(crate) struct Matcher<'a> {
    g: &'a Graph,
    /// Positions `j < k` whose pattern vertex is adjacent to position `k`.
    back: Vec<Vec<usize>>,
    domains: Vec<&'a [u64]>,
    injective: bool,
}

impl<'a> Matcher<'a> {
    /// `domains[v]` restricts pattern vertex `v`; positions follow `order`.
    pub(crate) fn new(
        g: &'a Graph,
        h: &Pattern,
        order: &[usize],
        domains: Vec<&'a [u64]>,
        injective: bool,
    ) -> Self {
        let back = order
            .iter()
            .enumerate()
            .map(|(k, &v)| (0..k).filter(|&j| h.has_edge(order[j], v)).collect())
            .collect();
        let domains = order.iter().map(|&v| domains[v]).collect();
        Matcher {
            g,
            back,
            domains,
            injective,
        }
    }

    fn words(&self) -> usize {
        self.domains.first().map_or(0, |d| d.len())
    }

    /// Counts completions of `prefix` (graph vertices for the first positions).
    pub(crate) fn count_from(&self, prefix: &[usize]) -> u128 {
        let r = self.back.len();
        if prefix.len() == r {
            return u128::from(self.prefix_valid(prefix));
        }
        if !self.prefix_valid(prefix) {
            return 0;
        }
        let mut assigned = prefix.to_vec();
        let mut bufs = vec![vec![0u64; self.words()]; r];
        self.rec(prefix.len(), &mut assigned, &mut bufs[prefix.len()..])
    }

    /// Full count, splitting the first level across threads on large inputs.
    pub(crate) fn count(&self) -> u128 {
        let r = self.back.len();
        if r == 0 {
            return 1;
        }
        let mut first = vec![0u64; self.words()];
        self.candidates(0, &[], &mut first);
        let firsts: Vec<usize> = iter_bits(&first).collect();
        if r == 1 {
            return firsts.len() as u128;
        }
        if firsts.len() >= PAR_THRESHOLD && rayon::current_num_threads() > 1 {
            firsts.par_iter().map(|&v| self.count_from(&[v])).sum()
        } else {
            let mut bufs = vec![vec![0u64; self.words()]; r];
            let mut assigned = Vec::with_capacity(r);
            firsts
                .iter()
                .map(|&v| {
                    assigned.clear();
                    assigned.push(v);
                    self.rec(1, &mut assigned, &mut bufs[1..])
                })
                .sum()
        }
    }

    fn prefix_valid(&self, prefix: &[usize]) -> bool {
        for (k, &v) in prefix.iter().enumerate() {
            if self.domains[k][v / 64] >> (v % 64) & 1 == 0 {
                return false;
            }
            if self.back[k].iter().any(|&j| !self.g.has_edge(prefix[j], v)) {
                return false;
            }
            if self.injective && prefix[..k].contains(&v) {
                return false;
            }
        }
        true
    }

    fn candidates(&self, pos: usize, assigned: &[usize], out: &mut [u64]) {
        out.copy_from_slice(self.domains[pos]);
        for &j in &self.back[pos] {
            let row = self.g.row(assigned[j]);
            for (o, w) in out.iter_mut().zip(row) {
                *o &= w;
            }
        }
        if self.injective {
            for &u in assigned {
                out[u / 64] &= !(1u64 << (u % 64));
            }
        }
    }

    /// `bufs[0]` is the candidate buffer for `pos`, deeper levels follow.
    fn rec(&self, pos: usize, assigned: &mut Vec<usize>, bufs: &mut [Vec<u64>]) -> u128 {
        let (cand, rest) = bufs.split_first_mut().expect("buffer per level");
        self.candidates(pos, assigned, cand);
        if pos + 1 == self.back.len() {
            return cand.iter().map(|w| w.count_ones() as u128).sum();
        }
        let mut total = 0u128;
        for (wi, &word) in cand.iter().enumerate() {
            let mut w = word;
            while w != 0 {
                let v = wi * 64 + w.trailing_zeros() as usize;
                w &= w - 1;
                assigned.push(v);
                total += self.rec(pos + 1, assigned, rest);
                assigned.pop();
            }
        }
        total
    }
}

pub(crate) fn iter_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(wi, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            }
        })
    })
}
