use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::pattern::Pattern;
use crate::vertex_set::VertexSet;

use super::matcher::{iter_bits, placement_order, Matcher};

/// Rejects inputs whose labelled counts could exceed 128-bit accumulation.
pub fn check_capacity(n: usize, r: usize) -> Result<()> {
    if (n as f64).powi(r as i32) >= 2f64.powi(126) {
        return Err(Error::CountOverflow { n, r });
    }
    Ok(())
}

/// Number of edge-preserving maps `V(H) → V(G)`, not necessarily injective.
/// With `targets`, pattern vertex `i` must land in `targets[i]`.
pub fn count_homomorphisms(h: &Pattern, g: &Graph, targets: Option<&[VertexSet]>) -> Result<u128> {
    check_capacity(g.n(), h.r())?;
    let full = g.all_vertices();
    let domains: Vec<&[u64]> = match targets {
        Some(t) => {
            if t.len() != h.r() {
                return Err(Error::invalid(format!(
                    "{} target sets for a pattern on {} vertices",
                    t.len(),
                    h.r()
                )));
            }
            t.iter().map(|s| s.words()).collect()
        }
        None => vec![full.words(); h.r()],
    };
    let order = placement_order(h, None);
    Ok(Matcher::new(g, h, &order, domains, false).count())
}

/// Labelled copies of `H` inside `s`: injective edge-preserving maps into `s`.
/// Non-edges of `H` are unconstrained (copies, not induced copies).
pub fn count_labeled_copies(h: &Pattern, g: &Graph, s: &VertexSet) -> Result<u128> {
    check_capacity(g.n(), h.r())?;
    Ok(labeled_copies_unchecked(h, g, s))
}

pub(crate) fn labeled_copies_unchecked(h: &Pattern, g: &Graph, s: &VertexSet) -> u128 {
    let order = placement_order(h, None);
    Matcher::new(g, h, &order, vec![s.words(); h.r()], true).count()
}

/// Unlabelled copies: labelled copies divided by `|Aut(H)|`.
pub fn count_unlabeled_copies(h: &Pattern, g: &Graph, s: &VertexSet) -> Result<u128> {
    Ok(count_labeled_copies(h, g, s)? / h.automorphism_count() as u128)
}

/// Labelled copies inside `s ∪ {v}` that use `v`; the change in the copy count
/// when `v` is added to `s`.
pub fn count_copies_through(h: &Pattern, g: &Graph, s: &VertexSet, v: usize) -> u128 {
    let mut dom = s.clone();
    dom.insert(v);
    (0..h.r())
        .map(|i| {
            let order = placement_order(h, Some(i));
            Matcher::new(g, h, &order, vec![dom.words(); h.r()], true).count_from(&[v])
        })
        .sum()
}

/// Counting mode for copies with one vertex in each part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PartiteMode {
    /// Every labelled copy with exactly one vertex in each `V_i`, any assignment.
    Averaged,
    /// Copies where pattern vertex `v` lands in `V_{π(v)}`.
    Ordered(Vec<usize>),
}

fn check_parts(h: &Pattern, parts: &[VertexSet]) -> Result<()> {
    if parts.len() != h.r() {
        return Err(Error::invalid(format!(
            "{} parts for a pattern on {} vertices",
            parts.len(),
            h.r()
        )));
    }
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            if !parts[i].is_disjoint(&parts[j]) {
                return Err(Error::invalid(format!("parts {i} and {j} overlap")));
            }
        }
    }
    Ok(())
}

fn check_permutation(pi: &[usize], r: usize) -> Result<()> {
    let mut seen = vec![false; r];
    if pi.len() != r {
        return Err(Error::invalid(
            "permutation length differs from pattern order",
        ));
    }
    for &x in pi {
        if x >= r || seen[x] {
            return Err(Error::invalid(format!(
                "{pi:?} is not a permutation of [0, {r})"
            )));
        }
        seen[x] = true;
    }
    Ok(())
}

/// Labelled copies of `H` with one vertex in each of the `r` disjoint parts.
pub fn count_partite(
    h: &Pattern,
    g: &Graph,
    parts: &[VertexSet],
    mode: &PartiteMode,
) -> Result<u128> {
    check_parts(h, parts)?;
    check_capacity(g.n(), h.r())?;
    Ok(match mode {
        PartiteMode::Ordered(pi) => {
            check_permutation(pi, h.r())?;
            ordered_partite_unchecked(h, g, parts, pi)
        }
        PartiteMode::Averaged => averaged_partite_unchecked(h, g, parts),
    })
}

pub(crate) fn ordered_partite_unchecked(
    h: &Pattern,
    g: &Graph,
    parts: &[VertexSet],
    pi: &[usize],
) -> u128 {
    let domains: Vec<&[u64]> = pi.iter().map(|&i| parts[i].words()).collect();
    let order = placement_order(h, None);
    // Parts are disjoint, so every such homomorphism is injective.
    Matcher::new(g, h, &order, domains, false).count()
}

/// Single DFS that tracks which parts are already occupied.
pub(crate) fn averaged_partite_unchecked(h: &Pattern, g: &Graph, parts: &[VertexSet]) -> u128 {
    let r = h.r();
    let n = g.n();
    let mut part_of = vec![usize::MAX; n];
    for (i, p) in parts.iter().enumerate() {
        for v in p {
            part_of[v] = i;
        }
    }
    let order = placement_order(h, None);
    let back: Vec<Vec<usize>> = order
        .iter()
        .enumerate()
        .map(|(k, &v)| (0..k).filter(|&j| h.has_edge(order[j], v)).collect())
        .collect();
    let words = parts
        .first()
        .map_or(0, |p| p.words().len())
        .max(n.div_ceil(64));
    let ctx = PartiteCtx {
        g,
        parts,
        part_of: &part_of,
        back: &back,
        words,
    };
    let mut assigned = Vec::with_capacity(r);
    ctx.rec(0, 0, &mut assigned)
}

struct PartiteCtx<'a> {
    g: &'a Graph,
    parts: &'a [VertexSet],
    part_of: &'a [usize],
    back: &'a [Vec<usize>],
    words: usize,
}

impl PartiteCtx<'_> {
    fn rec(&self, pos: usize, used_parts: u16, assigned: &mut Vec<usize>) -> u128 {
        let mut cand = vec![0u64; self.words];
        for (i, p) in self.parts.iter().enumerate() {
            if used_parts >> i & 1 == 0 {
                for (c, w) in cand.iter_mut().zip(p.words()) {
                    *c |= w;
                }
            }
        }
        for &j in &self.back[pos] {
            for (c, w) in cand.iter_mut().zip(self.g.row(assigned[j])) {
                *c &= w;
            }
        }
        if pos + 1 == self.back.len() {
            return cand.iter().map(|w| w.count_ones() as u128).sum();
        }
        let mut total = 0;
        for v in iter_bits(&cand) {
            assigned.push(v);
            total += self.rec(pos + 1, used_parts | 1 << self.part_of[v], assigned);
            assigned.pop();
        }
        total
    }
}

/// `N_H(V_1..V_r) = Σ_{S ⊆ [r]} (-1)^{r-|S|} N_H(U_S)` with `U_S = ∪_{i∈S} V_i`.
pub fn partite_count_via_inclusion_exclusion(
    h: &Pattern,
    g: &Graph,
    parts: &[VertexSet],
) -> Result<u128> {
    check_parts(h, parts)?;
    check_capacity(g.n(), h.r())?;
    let r = h.r();
    let mut total: i128 = 0;
    for mask in 1u32..(1 << r) {
        let mut union = VertexSet::empty(g.n());
        for (i, p) in parts.iter().enumerate() {
            if mask >> i & 1 == 1 {
                union = union.union(p);
            }
        }
        let n_s = labeled_copies_unchecked(h, g, &union) as i128;
        if (r - mask.count_ones() as usize) % 2 == 0 {
            total += n_s;
        } else {
            total -= n_s;
        }
    }
    u128::try_from(total)
        .map_err(|_| Error::Invariant(format!("inclusion-exclusion gave negative count {total}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{gen_gnp, Seed};
    use crate::pattern::for_each_permutation;
    use proptest::prelude::*;

    /// Oracle: enumerate all `n^r` maps.
    fn brute_hom(
        h: &Pattern,
        g: &Graph,
        targets: Option<&[VertexSet]>,
        injective: bool,
        s: &VertexSet,
    ) -> u128 {
        let n = g.n();
        let r = h.r();
        let mut count = 0;
        let mut map = vec![0usize; r];
        let total = n.pow(r as u32);
        for code in 0..total {
            let mut c = code;
            for slot in map.iter_mut() {
                *slot = c % n;
                c /= n;
            }
            if map.iter().any(|&v| !s.contains(v)) {
                continue;
            }
            if let Some(t) = targets {
                if (0..r).any(|i| !t[i].contains(map[i])) {
                    continue;
                }
            }
            if injective {
                let mut sorted = map.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() != r {
                    continue;
                }
            }
            if h.edges().iter().all(|&(u, v)| g.has_edge(map[u], map[v])) {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn homomorphism_examples() {
        let g = gen_gnp(9, 0.5, Seed(2)).unwrap();
        assert_eq!(
            count_homomorphisms(&Pattern::complete(2), &g, None).unwrap(),
            2 * g.edge_count() as u128
        );
        assert_eq!(
            count_homomorphisms(&Pattern::complete(3), &Graph::complete(7), None).unwrap(),
            7 * 6 * 5
        );
        assert_eq!(
            count_homomorphisms(&Pattern::cycle(4), &Graph::complete_bipartite(2, 2), None)
                .unwrap(),
            32
        );
    }

    #[test]
    fn labeled_copy_examples() {
        let k7 = Graph::complete(7);
        assert_eq!(
            count_labeled_copies(&Pattern::complete(4), &k7, &k7.all_vertices()).unwrap(),
            7 * 6 * 5 * 4
        );
        let k3 = Graph::complete(3);
        assert_eq!(
            count_labeled_copies(&Pattern::path(3), &k3, &k3.all_vertices()).unwrap(),
            6
        );
        assert_eq!(
            count_unlabeled_copies(&Pattern::cycle(4), &Graph::complete(4), &VertexSet::full(4))
                .unwrap(),
            3
        );
    }

    #[test]
    fn matches_brute_force_on_small_graphs() {
        let patterns = [
            Pattern::complete(3),
            Pattern::cycle(4),
            Pattern::path(3),
            Pattern::path(4),
        ];
        for seed in 0..6 {
            let g = gen_gnp(6, 0.55, Seed(seed)).unwrap();
            let all = g.all_vertices();
            let s = VertexSet::from_indices(6, [0, 1, 2, 4, 5]);
            for h in &patterns {
                assert_eq!(
                    count_homomorphisms(h, &g, None).unwrap(),
                    brute_hom(h, &g, None, false, &all)
                );
                assert_eq!(
                    count_labeled_copies(h, &g, &s).unwrap(),
                    brute_hom(h, &g, None, true, &s)
                );
            }
        }
    }

    #[test]
    fn targeted_homomorphisms_match_brute_force() {
        let g = gen_gnp(6, 0.6, Seed(9)).unwrap();
        let h = Pattern::path(3);
        let t = vec![
            VertexSet::from_indices(6, [0, 1, 2]),
            VertexSet::from_indices(6, [1, 2, 3, 4]),
            VertexSet::from_indices(6, [0, 5]),
        ];
        let all = g.all_vertices();
        assert_eq!(
            count_homomorphisms(&h, &g, Some(&t)).unwrap(),
            brute_hom(&h, &g, Some(&t), false, &all)
        );
    }

    #[test]
    fn copies_through_vertex_is_count_difference() {
        let g = gen_gnp(12, 0.5, Seed(4)).unwrap();
        let s = VertexSet::from_indices(12, [0, 2, 3, 5, 7, 8, 11]);
        for h in [
            Pattern::complete(2),
            Pattern::complete(3),
            Pattern::cycle(4),
            Pattern::path(3),
        ] {
            for v in [1, 4, 9] {
                let mut with = s.clone();
                with.insert(v);
                let diff = count_labeled_copies(&h, &g, &with).unwrap()
                    - count_labeled_copies(&h, &g, &s).unwrap();
                assert_eq!(count_copies_through(&h, &g, &s, v), diff, "{h} v={v}");
            }
        }
    }

    #[test]
    fn partite_examples() {
        let edge = Graph::complete(2);
        let parts = [
            VertexSet::from_indices(2, [0]),
            VertexSet::from_indices(2, [1]),
        ];
        assert_eq!(
            count_partite(&Pattern::complete(2), &edge, &parts, &PartiteMode::Averaged).unwrap(),
            2
        );
        assert_eq!(
            partite_count_via_inclusion_exclusion(&Pattern::complete(2), &edge, &parts).unwrap(),
            2
        );

        let k6 = Graph::complete(6);
        let parts: Vec<_> = (0..3)
            .map(|i| VertexSet::from_indices(6, [2 * i, 2 * i + 1]))
            .collect();
        assert_eq!(
            count_partite(&Pattern::complete(3), &k6, &parts, &PartiteMode::Averaged).unwrap(),
            48
        );

        let mut with_empty = parts.clone();
        with_empty[1] = VertexSet::empty(6);
        assert_eq!(
            partite_count_via_inclusion_exclusion(&Pattern::complete(3), &k6, &with_empty).unwrap(),
            0
        );
    }

    #[test]
    fn partite_rejects_overlap_and_bad_permutation() {
        let g = Graph::complete(4);
        let parts = [
            VertexSet::from_indices(4, [0, 1]),
            VertexSet::from_indices(4, [1, 2]),
        ];
        assert!(count_partite(&Pattern::complete(2), &g, &parts, &PartiteMode::Averaged).is_err());
        let parts = [
            VertexSet::from_indices(4, [0]),
            VertexSet::from_indices(4, [1]),
        ];
        assert!(count_partite(
            &Pattern::complete(2),
            &g,
            &parts,
            &PartiteMode::Ordered(vec![0, 0])
        )
        .is_err());
    }

    #[test]
    fn averaged_is_sum_over_orderings() {
        let g = gen_gnp(10, 0.5, Seed(3)).unwrap();
        let parts = vec![
            VertexSet::from_indices(10, [0, 1, 2]),
            VertexSet::from_indices(10, [3, 4, 5]),
            VertexSet::from_indices(10, [6, 7, 8, 9]),
        ];
        for h in [Pattern::complete(3), Pattern::path(3)] {
            let mut sum = 0;
            for_each_permutation(3, |pi| {
                sum += count_partite(&h, &g, &parts, &PartiteMode::Ordered(pi.to_vec())).unwrap();
            });
            assert_eq!(
                count_partite(&h, &g, &parts, &PartiteMode::Averaged).unwrap(),
                sum
            );
        }
    }

    #[test]
    fn overflow_guard() {
        assert!(check_capacity(5000, 10).is_ok());
        assert!(check_capacity(1 << 20, 10).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn inclusion_exclusion_matches_direct(seed in 0u64..1000, assign in proptest::collection::vec(0usize..4, 10)) {
            let g = gen_gnp(10, 0.5, Seed(seed)).unwrap();
            let parts: Vec<_> = (0..3)
                .map(|i| VertexSet::from_indices(10, assign.iter().enumerate().filter(|(_, &a)| a == i + 1).map(|(v, _)| v)))
                .collect();
            let h = Pattern::complete(3);
            prop_assert_eq!(
                count_partite(&h, &g, &parts, &PartiteMode::Averaged).unwrap(),
                partite_count_via_inclusion_exclusion(&h, &g, &parts).unwrap()
            );
        }

        #[test]
        fn copies_bounded_by_homomorphisms(seed in 0u64..1000, bits in 0u64..(1 << 9)) {
            let g = gen_gnp(9, 0.6, Seed(seed)).unwrap();
            let s = VertexSet::from_mask(9, bits);
            for h in [Pattern::complete(3), Pattern::cycle(4), Pattern::path(3)] {
                let copies = count_labeled_copies(&h, &g, &s).unwrap();
                let homs = count_homomorphisms(&h, &g.induced_subgraph(&s), None).unwrap();
                prop_assert!(copies <= homs);
                let r = h.r() as u128;
                let size = s.len() as u128;
                // Non-injective maps number fewer than r² |S|^{r-1}.
                prop_assert!(homs - copies < (r * r * size.pow(h.r() as u32 - 1)).max(1));
            }
        }
    }
}
