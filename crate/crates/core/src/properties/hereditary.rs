use rand::Rng;
use rayon::prelude::*;

use crate::counting::{count_copies_through, count_labeled_copies};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::pattern::Pattern;
use crate::scalar::Scalar;
use crate::vertex_set::VertexSet;

use super::mask::{MaskGraph, MaskPattern, Shape};
use super::{
    pick_max, DefectReport, Family, Mode, PropertyKind, Scored, EXACT_MAX_N,
    EXACT_MAX_N_LARGE_PATTERN,
};

/// Low vertices walked by one Gray-code shard; the rest are fixed per shard.
const SHARD_BITS: usize = 6;

pub(crate) fn check_p<T: Scalar>(p: &T) -> Result<()> {
    if *p < T::zero() || *p > T::one() {
        return Err(Error::invalid(format!(
            "reference density {p} outside [0,1]"
        )));
    }
    Ok(())
}

pub fn defect_global<T: Scalar>(g: &Graph, h: &Pattern, p: &T) -> Result<DefectReport<T>> {
    check_p(p)?;
    let all = g.all_vertices();
    let count = count_labeled_copies(h, g, &all)?;
    let kind = PropertyKind {
        family: Family::Global,
        pattern: h.clone(),
        p: p.clone(),
    };
    Ok(DefectReport::for_set(kind, g, all, count, Mode::Exact))
}

pub fn defect_hereditary<T: Scalar>(
    g: &Graph,
    h: &Pattern,
    p: &T,
    mode: Mode,
) -> Result<DefectReport<T>> {
    check_p(p)?;
    crate::counting::check_capacity(g.n(), h.r())?;
    let kind = PropertyKind {
        family: Family::Hereditary,
        pattern: h.clone(),
        p: p.clone(),
    };
    let cands = match mode {
        Mode::Exact => exact_candidates(g, h, p.as_f64())?,
        Mode::Sampled {
            samples,
            seed,
            local_search,
        } => {
            if samples == 0 {
                return Err(Error::invalid("sampled mode needs at least one sample"));
            }
            let scores: Vec<(f64, VertexSet)> = (0..samples)
                .into_par_iter()
                .map(|i| {
                    sample_one(
                        g,
                        h,
                        p.as_f64(),
                        seed.stream(i as u64),
                        i == 0,
                        local_search,
                    )
                })
                .collect();
            let mut acc = Scored::new();
            for (score, s) in scores {
                acc.offer(score, || s);
            }
            acc.into_candidates()
        }
    };
    let reports = cands
        .into_iter()
        .map(|s| {
            let count = count_labeled_copies(h, g, &s)?;
            Ok(DefectReport::for_set(kind.clone(), g, s, count, mode))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(pick_max(reports))
}

fn score(count: u128, pm: f64, size: usize, r: usize, norm: f64) -> f64 {
    (count as f64 - pm * (size as f64).powi(r as i32)).abs() / norm
}

fn exact_candidates(g: &Graph, h: &Pattern, p: f64) -> Result<Vec<VertexSet>> {
    let n = g.n();
    let cap = if h.r() >= 4 {
        EXACT_MAX_N_LARGE_PATTERN
    } else {
        EXACT_MAX_N
    };
    if n > cap {
        return Err(Error::ExactLimit(format!(
            "exact hereditary defect needs n <= {cap} for {h}, got n = {n}"
        )));
    }
    let mg = MaskGraph::new(g);
    let mp = MaskPattern::new(h);
    let r = h.r();
    let pm = p.powi(h.m() as i32);
    let norm = (n as f64).powi(r as i32);
    let low = n.min(SHARD_BITS.max(n.saturating_sub(SHARD_BITS)));
    let high = n - low;
    let shards: Vec<Scored<u64>> = (0u64..1 << high)
        .into_par_iter()
        .map(|hi| {
            let mut s = hi << low;
            let mut count = mp.count(&mg, s);
            let mut size = s.count_ones() as usize;
            let mut acc = Scored::new();
            acc.offer(score(count, pm, size, r, norm), || s);
            for i in 1u64..1 << low {
                let v = i.trailing_zeros() as usize;
                if s >> v & 1 == 1 {
                    s &= !(1 << v);
                    count -= mp.through(&mg, s, v);
                    size -= 1;
                } else {
                    count += mp.through(&mg, s, v);
                    s |= 1 << v;
                    size += 1;
                }
                let sc = score(count, pm, size, r, norm);
                acc.offer(sc, || s);
            }
            acc
        })
        .collect();
    let merged = shards.into_iter().fold(Scored::new(), Scored::merge);
    Ok(merged
        .into_candidates()
        .into_iter()
        .map(|m| VertexSet::from_mask(n, m))
        .collect())
}

/// Copies gained by adding `v ∉ s` to `s`.
pub(crate) fn through_set(shape: Shape, h: &Pattern, g: &Graph, s: &VertexSet, v: usize) -> u128 {
    match shape {
        Shape::Edge => 2 * s.count_in(g.row(v)) as u128,
        Shape::Triangle => {
            let nv = g.neighbors(v).intersection(s);
            3 * nv
                .iter()
                .map(|u| nv.count_in(g.row(u)) as u128)
                .sum::<u128>()
        }
        Shape::General => count_copies_through(h, g, s, v),
    }
}

fn sample_one(
    g: &Graph,
    h: &Pattern,
    p: f64,
    mut rng: rand_chacha::ChaCha8Rng,
    first: bool,
    local_search: bool,
) -> (f64, VertexSet) {
    let n = g.n();
    let r = h.r();
    let pm = p.powi(h.m() as i32);
    let norm = (n as f64).powi(r as i32);
    let mut s = if first {
        g.all_vertices()
    } else {
        let rho: f64 = rng.gen_range(0.05..0.95);
        VertexSet::from_indices(n, (0..n).filter(|_| rng.gen::<f64>() < rho))
    };
    let mut count = count_labeled_copies(h, g, &s).expect("capacity checked by caller");
    let mut best = score(count, pm, s.len(), r, norm);
    if local_search {
        let shape = MaskPattern::shape_of(h);
        for _ in 0..5 * n {
            let v = rng.gen_range(0..n);
            let (next, size) = if s.contains(v) {
                let mut t = s.clone();
                t.remove(v);
                (count - through_set(shape, h, g, &t, v), s.len() - 1)
            } else {
                (count + through_set(shape, h, g, &s, v), s.len() + 1)
            };
            let sc = score(next, pm, size, r, norm);
            if sc > best {
                best = sc;
                count = next;
                s.toggle(v);
            }
        }
    }
    (best, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{build_four_block_counterexample, gen_gnp, Seed};
    use crate::scalar::{parse_scalar, Rational};
    use num_traits::Signed;

    fn brute(g: &Graph, h: &Pattern, p: &Rational) -> Rational {
        let n = g.n();
        let mut best = Rational::from_integer(0.into());
        for mask in 0u64..1 << n {
            let s = VertexSet::from_mask(n, mask);
            let c = count_labeled_copies(h, g, &s).unwrap();
            let rep = DefectReport::for_set(
                PropertyKind {
                    family: Family::Hereditary,
                    pattern: h.clone(),
                    p: p.clone(),
                },
                g,
                s,
                c,
                Mode::Exact,
            );
            if rep.defect > best {
                best = rep.defect;
            }
        }
        best
    }

    #[test]
    fn global_examples() {
        let k10 = Graph::complete(10);
        let rep = defect_global(&k10, &Pattern::complete(3), &1.0f64).unwrap();
        assert!((rep.defect - 0.28).abs() < 1e-12);
        let rep = defect_global(&Graph::empty(7), &Pattern::complete(3), &0.5f64).unwrap();
        assert_eq!(rep.defect, 0.125);
        let g = gen_gnp(200, 0.5, Seed(1)).unwrap();
        assert!(
            defect_global(&g, &Pattern::complete(3), &0.5f64)
                .unwrap()
                .defect
                < 0.02
        );
    }

    #[test]
    fn exact_matches_brute_force() {
        let p: Rational = parse_scalar("1/2").unwrap();
        for seed in 0..3 {
            let g = gen_gnp(9, 0.5, Seed(seed)).unwrap();
            for h in [
                Pattern::complete(2),
                Pattern::complete(3),
                Pattern::path(3),
                Pattern::cycle(4),
            ] {
                let rep = defect_hereditary(&g, &h, &p, Mode::Exact).unwrap();
                assert_eq!(rep.defect, brute(&g, &h, &p), "{h} seed {seed}");
                assert!(rep.verify(&g).unwrap());
            }
        }
    }

    #[test]
    fn complete_graph_edge_defect() {
        let n = 12;
        let rep = defect_hereditary(
            &Graph::complete(n),
            &Pattern::complete(2),
            &Rational::from_integer(1.into()),
            Mode::Exact,
        )
        .unwrap();
        assert_eq!(rep.defect, Rational::new(1.into(), (n as i64).into()));
        assert_eq!(rep.witness, super::super::Witness::Set(VertexSet::full(n)));
    }

    #[test]
    fn counterexample_exact_edge_defect() {
        let planted = build_four_block_counterexample(16, Seed(1)).unwrap();
        let g = &planted.graph;
        let p: Rational = parse_scalar("1/2").unwrap();
        let rep = defect_hereditary(g, &Pattern::complete(2), &p, Mode::Exact).unwrap();
        let v12 = planted
            .layout
            .block(0, 16)
            .union(&planted.layout.block(1, 16));
        let e = g.edges_within(&v12) as i64;
        let floor = (Rational::from_integer((2 * e).into())
            - p.clone() * Rational::from_integer(64.into()))
        .abs()
            / Rational::from_integer(256.into());
        assert!(rep.defect >= floor);
        assert!(rep.verify(g).unwrap());
    }

    #[test]
    fn sampled_is_deterministic_monotone_and_below_exact() {
        let g = gen_gnp(14, 0.5, Seed(2)).unwrap();
        let h = Pattern::complete(3);
        let exact = defect_hereditary(&g, &h, &0.5f64, Mode::Exact).unwrap();
        let mut last = 0.0;
        for samples in [1, 4, 16, 40] {
            let mode = Mode::Sampled {
                samples,
                seed: Seed(7),
                local_search: true,
            };
            let a = defect_hereditary(&g, &h, &0.5f64, mode).unwrap();
            let b = defect_hereditary(&g, &h, &0.5f64, mode).unwrap();
            assert_eq!(a.witness, b.witness);
            assert!(a.defect <= exact.defect);
            assert!(a.defect >= last);
            assert!(a.verify(&g).unwrap());
            last = a.defect;
        }
    }

    #[test]
    fn exact_limits() {
        let g = gen_gnp(25, 0.5, Seed(1)).unwrap();
        assert!(matches!(
            defect_hereditary(&g, &Pattern::complete(2), &0.5f64, Mode::Exact),
            Err(Error::ExactLimit(_))
        ));
        let g = gen_gnp(19, 0.5, Seed(1)).unwrap();
        assert!(defect_hereditary(&g, &Pattern::complete(4), &0.5f64, Mode::Exact).is_err());
    }
}
