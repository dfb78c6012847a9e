use serde::Serialize;

use crate::counting::count_homomorphisms;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::pattern::Pattern;
use crate::scalar::Scalar;
use crate::vertex_set::VertexSet;

use super::{find_irregularity_witness, pair_density, Direction, RegularityWitness, Strategy};

/// Turns a witness against `(d(A, B), ε)`-regularity in one direction into
/// one against `(d(A, B), ε/2)`-regularity in the other.
///
/// `e(A', B') + e(A \ A', B) + e(A', B \ B') = d(A, B)|A||B|` splits the same
/// way as the expected counts, so the two complementary pairs carry the
/// opposite deviation between them. The larger one is returned; ties go to
/// the larger `|A''||B''|`.
pub fn convert_witness<T: Scalar>(
    g: &Graph,
    w: &RegularityWitness<T>,
) -> Result<RegularityWitness<T>> {
    let d = pair_density::<T>(g, &w.host_a, &w.host_b);
    if w.q != d {
        return Err(Error::Precondition("conversion needs q = d(A, B)".into()));
    }
    if !w.recheck(g) || !w.violates() {
        return Err(Error::Precondition(
            "input pair is not a violating witness".into(),
        ));
    }
    let dir = w.direction.opposite();
    let half = w.eps.clone() / T::of_usize(2);
    let host = (&w.host_a, &w.host_b);
    let first = RegularityWitness::new(
        g,
        w.host_a.difference(&w.a_prime),
        w.host_b.clone(),
        dir,
        host,
        d.clone(),
        half.clone(),
    );
    let second = RegularityWitness::new(
        g,
        w.a_prime.clone(),
        w.host_b.difference(&w.b_prime),
        dir,
        host,
        d,
        half,
    );
    let score = |c: &RegularityWitness<T>| {
        if dir == Direction::Upper {
            c.deviation()
        } else {
            -c.deviation()
        }
    };
    let area = |c: &RegularityWitness<T>| c.a_prime.len() * c.b_prime.len();
    let (s1, s2) = (score(&first), score(&second));
    let out = if s2 > s1 || (s2 == s1 && area(&second) > area(&first)) {
        second
    } else {
        first
    };
    if !out.violates() {
        return Err(Error::Invariant(
            "neither complementary pair violates at half the tolerance".into(),
        ));
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct Equalized<T> {
    pub witness: RegularityWitness<T>,
    /// `q ± ε min(|A|/|A'|, |B|/|B'|)`, which the new density reaches.
    pub required_density: T,
}

/// Equal-size witness: the smaller side is kept and the other side shrinks
/// to its `|A_0|` vertices with the most (upper) or fewest (lower) neighbours
/// in the kept side. Ties go to smaller indices.
pub fn equalize_witness<T: Scalar>(g: &Graph, w: &RegularityWitness<T>) -> Result<Equalized<T>> {
    if !w.recheck(g) || !w.violates() {
        return Err(Error::Precondition(
            "input pair is not a violating witness".into(),
        ));
    }
    let keep_a = w.a_prime.len() <= w.b_prime.len();
    let (kept, other) = if keep_a {
        (&w.a_prime, &w.b_prime)
    } else {
        (&w.b_prime, &w.a_prime)
    };
    let mut ranked: Vec<(usize, usize)> =
        other.iter().map(|v| (kept.count_in(g.row(v)), v)).collect();
    match w.direction {
        Direction::Upper => ranked.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1))),
        Direction::Lower => ranked.sort(),
    }
    let chosen = VertexSet::from_indices(g.n(), ranked[..kept.len()].iter().map(|&(_, v)| v));
    let (ap, bp) = if keep_a {
        (kept.clone(), chosen)
    } else {
        (chosen, kept.clone())
    };
    let out = RegularityWitness::new(
        g,
        ap,
        bp,
        w.direction,
        (&w.host_a, &w.host_b),
        w.q.clone(),
        w.eps.clone(),
    );
    let ra = T::of_usize(w.host_a.len()) / T::of_usize(out.a_prime.len());
    let rb = T::of_usize(w.host_b.len()) / T::of_usize(out.b_prime.len());
    let shift = w.eps.clone() * if ra < rb { ra } else { rb };
    let (required, ok) = match w.direction {
        Direction::Upper => {
            let req = w.q.clone() + shift;
            (req.clone(), out.density() >= req)
        }
        Direction::Lower => {
            let req = w.q.clone() - shift;
            (req.clone(), out.density() <= req)
        }
    };
    if !ok {
        return Err(Error::Invariant(
            "equalized pair misses the required density".into(),
        ));
    }
    Ok(Equalized {
        witness: out,
        required_density: required,
    })
}

/// `(∏ p_ij - e(H) ε) ∏ |V_i|`, densities in the order of `h.edges()`.
pub fn counting_lower_bound<T: Scalar>(
    h: &Pattern,
    densities: &[T],
    eps: &T,
    part_sizes: &[usize],
) -> Result<T> {
    if densities.len() != h.m() {
        return Err(Error::invalid(format!(
            "expected {} pair densities, got {}",
            h.m(),
            densities.len()
        )));
    }
    if part_sizes.len() != h.r() {
        return Err(Error::invalid(format!(
            "expected {} part sizes, got {}",
            h.r(),
            part_sizes.len()
        )));
    }
    if densities.iter().any(|d| *d < T::zero() || *d > T::one()) {
        return Err(Error::invalid("pair densities must lie in [0,1]"));
    }
    if *eps < T::zero() {
        return Err(Error::invalid("tolerance must be non-negative"));
    }
    let prod = densities.iter().cloned().fold(T::one(), |x, y| x * y);
    let size = part_sizes.iter().fold(T::one(), |x, &s| x * T::of_usize(s));
    Ok((prod - T::of_usize(h.m()) * eps.clone()) * size)
}

#[derive(Clone, Debug, Serialize)]
pub struct CountingLemmaCheck<T> {
    /// Every pattern-edge pair was certified lower-regular by exhaustive search.
    pub certified: bool,
    pub homomorphisms: u128,
    pub bound: T,
    /// `homomorphisms ≥ bound`; only asserted for certified instances.
    pub holds: Option<bool>,
}

/// Certifies lower-`(p_ij, ε)`-regularity of every pattern-edge pair exactly,
/// then compares the homomorphism count (vertex `i` in `parts[i]`) with the bound.
pub fn check_counting_lemma<T: Scalar>(
    g: &Graph,
    h: &Pattern,
    parts: &[VertexSet],
    densities: &[T],
    eps: &T,
) -> Result<CountingLemmaCheck<T>> {
    let sizes: Vec<usize> = parts.iter().map(|p| p.len()).collect();
    let bound = counting_lower_bound(h, densities, eps, &sizes)?;
    let mut certified = true;
    for (k, &(i, j)) in h.edges().iter().enumerate() {
        let s = find_irregularity_witness(
            g,
            &parts[i],
            &parts[j],
            &densities[k],
            eps,
            Direction::Lower,
            Strategy::Exact,
        )?;
        certified &= s.certified_regular();
    }
    let homomorphisms = count_homomorphisms(h, g, Some(parts))?;
    let holds = certified.then(|| T::from_count(homomorphisms) >= bound);
    Ok(CountingLemmaCheck {
        certified,
        homomorphisms,
        bound,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{gen_gnp, Seed};
    use crate::graph::GraphBuilder;
    use crate::regularity::regularity_level;
    use crate::regularity::tests::dense_corner;
    use crate::scalar::{parse_scalar, Rational};

    fn rat(s: &str) -> Rational {
        parse_scalar(s).unwrap()
    }

    /// Sparse corner: everything between `A = [0,12)` and `B = [12,24)` except
    /// `A1 = [0,6)` to `B1 = [12,18)`.
    fn sparse_corner() -> (Graph, VertexSet, VertexSet) {
        let mut gb = GraphBuilder::new(24);
        for u in 0..12 {
            for v in 12..24 {
                if !(u < 6 && v < 18) {
                    gb.add_edge(u, v);
                }
            }
        }
        (
            gb.build(),
            VertexSet::from_range(24, 0..12),
            VertexSet::from_range(24, 12..24),
        )
    }

    #[test]
    fn sparse_corner_converts_to_upper() {
        let (g, a, b) = sparse_corner();
        let d = pair_density::<Rational>(&g, &a, &b);
        let s = find_irregularity_witness(
            &g,
            &a,
            &b,
            &d,
            &rat("1/10"),
            Direction::Lower,
            Strategy::Exact,
        )
        .unwrap();
        let w = s.witness.unwrap();
        let up = convert_witness(&g, &w).unwrap();
        assert_eq!(up.direction, Direction::Upper);
        assert_eq!(up.eps, rat("1/20"));
        assert!(up.violates() && up.recheck(&g));
        // Both complements add up to the negated deviation.
        let c1 = RegularityWitness::new(
            &g,
            a.difference(&w.a_prime),
            b.clone(),
            Direction::Upper,
            (&a, &b),
            d.clone(),
            rat("0"),
        );
        let c2 = RegularityWitness::new(
            &g,
            w.a_prime.clone(),
            b.difference(&w.b_prime),
            Direction::Upper,
            (&a, &b),
            d,
            rat("0"),
        );
        assert_eq!(c1.deviation() + c2.deviation(), -w.deviation());
    }

    #[test]
    fn upper_to_lower_both_complements_violate() {
        let (g, a, b) = dense_corner();
        let d = pair_density::<Rational>(&g, &a, &b);
        let w = find_irregularity_witness(
            &g,
            &a,
            &b,
            &d,
            &rat("1/10"),
            Direction::Upper,
            Strategy::Exact,
        )
        .unwrap()
        .witness
        .unwrap();
        let low = convert_witness(&g, &w).unwrap();
        assert_eq!(low.direction, Direction::Lower);
        assert!(low.violates());
        // A' = A1, B' = B1 with deviation 27; the complements (A2, B) and
        // (A1, B2) carry -18 and -9, and both break the halved tolerance.
        assert_eq!(low.a_prime, VertexSet::from_range(24, 6..12));
        assert_eq!(low.deviation(), rat("-18"));
        let c2 = RegularityWitness::new(
            &g,
            w.a_prime.clone(),
            b.difference(&w.b_prime),
            Direction::Lower,
            (&a, &b),
            d,
            rat("1/20"),
        );
        assert!(c2.violates());
        assert_eq!(c2.deviation(), rat("-9"));
    }

    #[test]
    fn conversion_rejects_wrong_reference_density() {
        let (g, a, b) = sparse_corner();
        let w = RegularityWitness::new(
            &g,
            a.clone(),
            b.clone(),
            Direction::Lower,
            (&a, &b),
            rat("1"),
            rat("1/10"),
        );
        assert!(convert_witness(&g, &w).is_err());
    }

    #[test]
    fn equalize_keeps_smaller_side_and_top_neighbours() {
        // A0 = {0,1,2}, B0 = {10..16}; vertex 10+k has k neighbours in A0 (capped).
        let mut gb = GraphBuilder::new(20);
        for k in 0..6 {
            for u in 0..(k.min(3)) {
                gb.add_edge(u, 10 + k);
            }
        }
        let g = gb.build();
        let a = VertexSet::from_range(20, 0..10);
        let b = VertexSet::from_range(20, 10..20);
        let w = RegularityWitness::new(
            &g,
            VertexSet::from_range(20, 0..3),
            VertexSet::from_range(20, 10..16),
            Direction::Upper,
            (&a, &b),
            rat("0"),
            rat("1/10"),
        );
        assert!(w.violates());
        let eq = equalize_witness(&g, &w).unwrap();
        assert_eq!(eq.witness.a_prime.len(), 3);
        assert_eq!(
            eq.witness.b_prime,
            VertexSet::from_indices(20, [13, 14, 15])
        );
        assert!(eq.witness.density() >= w.density());
        assert!(eq.witness.density() >= eq.required_density);
        assert_eq!(eq.required_density, rat("1/3"));
    }

    #[test]
    fn equalize_already_equal_and_lower() {
        let g = gen_gnp(16, 0.5, Seed(4)).unwrap();
        let a = VertexSet::from_range(16, 0..8);
        let b = VertexSet::from_range(16, 8..16);
        for dir in [Direction::Lower, Direction::Upper] {
            let d = pair_density::<Rational>(&g, &a, &b);
            let lvl = regularity_level(&g, &a, &b, &d, dir, Strategy::Exact).unwrap();
            let eps = lvl * rat("9/10");
            let w = find_irregularity_witness(&g, &a, &b, &d, &eps, dir, Strategy::Exact)
                .unwrap()
                .witness
                .unwrap();
            let eq = equalize_witness(&g, &w).unwrap();
            assert_eq!(eq.witness.a_prime.len(), eq.witness.b_prime.len());
            if w.a_prime.len() == w.b_prime.len() {
                assert_eq!(eq.witness.a_prime.len(), w.a_prime.len());
            }
            match dir {
                Direction::Upper => assert!(eq.witness.density() >= w.density()),
                Direction::Lower => assert!(eq.witness.density() <= w.density()),
            }
        }
    }

    #[test]
    fn counting_bound_tautologies() {
        let g = gen_gnp(12, 0.5, Seed(2)).unwrap();
        let v1 = VertexSet::from_range(12, 0..5);
        let v2 = VertexSet::from_range(12, 5..12);
        let d = pair_density::<Rational>(&g, &v1, &v2);
        let k2 = Pattern::complete(2);
        let bound = counting_lower_bound(&k2, &[d], &rat("0"), &[5, 7]).unwrap();
        assert_eq!(bound, rat(&g.edges_between(&v1, &v2).to_string()));
        let k = Graph::complete(9);
        let parts: Vec<_> = (0..3)
            .map(|i| VertexSet::from_range(9, 3 * i..3 * i + 3))
            .collect();
        let one = rat("1");
        let chk = check_counting_lemma(
            &k,
            &Pattern::complete(3),
            &parts,
            &[one.clone(), one.clone(), one],
            &rat("0"),
        )
        .unwrap();
        assert!(chk.certified);
        assert_eq!(chk.bound, rat("27"));
        assert_eq!(chk.homomorphisms, 27);
        assert_eq!(chk.holds, Some(true));
        assert!(counting_lower_bound(&k2, &[rat("2")], &rat("0"), &[1, 1]).is_err());
    }
}
