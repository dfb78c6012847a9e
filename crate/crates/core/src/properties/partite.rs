use rand::Rng;
use rayon::prelude::*;

use crate::counting::{count_partite, ordered_partite_unchecked, PartiteMode};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::pattern::{factorial, for_each_permutation, Pattern};
use crate::scalar::Scalar;
use crate::vertex_set::VertexSet;

use super::hereditary::check_p;
use super::mask::{MaskGraph, MaskPattern};
use super::{
    pick_max, DefectReport, Family, Mode, PropertyKind, Scored, EXACT_PARTITE_MAX_N,
    EXACT_PARTITE_MAX_R,
};

/// Vertices whose labels are fixed per exact-enumeration task.
const PREFIX_VERTICES: usize = 5;

/// Q: copies with one vertex in each part against `p^m r! ∏|V_i|`.
pub fn defect_partite<T: Scalar>(
    g: &Graph,
    h: &Pattern,
    p: &T,
    mode: Mode,
) -> Result<DefectReport<T>> {
    run(g, h, p, Family::Partite, None, mode)
}

/// R: copies with `v` in `V_{π(v)}` against `p^m ∏|V_i|`, for the given `π` or
/// maximised over all `π` when `pi` is `None`.
pub fn defect_ordered_partite<T: Scalar>(
    g: &Graph,
    h: &Pattern,
    p: &T,
    pi: Option<&[usize]>,
    mode: Mode,
) -> Result<DefectReport<T>> {
    run(g, h, p, Family::OrderedPartite, pi, mode)
}

struct Ctx<'a> {
    g: &'a Graph,
    h: &'a Pattern,
    mask: Option<(MaskGraph, MaskPattern)>,
    perms: Vec<Vec<usize>>,
    family: Family,
    pm: f64,
    norm: f64,
}

/// Part-label vector: 0 = unused, `k` = part `k - 1`.
type Labels = Vec<u8>;

impl Ctx<'_> {
    fn parts(&self, labels: &[u8]) -> Vec<VertexSet> {
        let r = self.h.r();
        let n = self.g.n();
        (0..r)
            .map(|k| VertexSet::from_indices(n, (0..n).filter(|&v| labels[v] as usize == k + 1)))
            .collect()
    }

    fn ordered_counts(&self, parts: &[VertexSet]) -> Vec<u128> {
        match &self.mask {
            Some((mg, mp)) => {
                let masks: Vec<u64> = parts.iter().map(|p| p.mask()).collect();
                self.perms
                    .iter()
                    .map(|pi| mp.ordered(mg, &masks, pi))
                    .collect()
            }
            None => self
                .perms
                .iter()
                .map(|pi| ordered_partite_unchecked(self.h, self.g, parts, pi))
                .collect(),
        }
    }

    /// Score and, for R, the index of the best permutation.
    fn score(&self, labels: &[u8]) -> (f64, usize) {
        let parts = self.parts(labels);
        let prod: f64 = parts.iter().map(|p| p.len() as f64).product();
        let counts = self.ordered_counts(&parts);
        match self.family {
            Family::Partite => {
                let total: u128 = counts.iter().sum();
                let exp = self.pm * factorial(self.h.r()) as f64 * prod;
                ((total as f64 - exp).abs() / self.norm, 0)
            }
            _ => {
                let mut best = (f64::NEG_INFINITY, 0);
                for (i, &c) in counts.iter().enumerate() {
                    let s = (c as f64 - self.pm * prod).abs() / self.norm;
                    if s > best.0 {
                        best = (s, i);
                    }
                }
                best
            }
        }
    }
}

fn run<T: Scalar>(
    g: &Graph,
    h: &Pattern,
    p: &T,
    family: Family,
    fixed_pi: Option<&[usize]>,
    mode: Mode,
) -> Result<DefectReport<T>> {
    check_p(p)?;
    let n = g.n();
    let r = h.r();
    if r > n {
        return Err(Error::invalid(format!(
            "pattern on {r} vertices needs at least {r} graph vertices, got {n}"
        )));
    }
    crate::counting::check_capacity(n, r)?;
    if let Some(pi) = fixed_pi {
        let mut seen = vec![false; r];
        if pi.len() != r
            || pi
                .iter()
                .any(|&x| x >= r || std::mem::replace(&mut seen[x], true))
        {
            return Err(Error::invalid(format!(
                "{pi:?} is not a permutation of [0, {r})"
            )));
        }
    }
    let mut perms = Vec::new();
    match (family, fixed_pi, mode) {
        // Sampled labelings are ordered, so a fixed π needs no relabelling.
        (Family::OrderedPartite, Some(pi), Mode::Sampled { .. }) => perms.push(pi.to_vec()),
        _ => for_each_permutation(r, |pi| perms.push(pi.to_vec())),
    }
    let ctx = Ctx {
        g,
        h,
        mask: (n <= 64).then(|| (MaskGraph::new(g), MaskPattern::new(h))),
        perms,
        family,
        pm: p.as_f64().powi(h.m() as i32),
        norm: (n as f64).powi(r as i32),
    };
    let cands: Vec<(Labels, usize)> = match mode {
        Mode::Exact => {
            if n > EXACT_PARTITE_MAX_N || r > EXACT_PARTITE_MAX_R {
                return Err(Error::ExactLimit(format!(
                    "exact partite defect needs n <= {EXACT_PARTITE_MAX_N} and r <= {EXACT_PARTITE_MAX_R}, got n = {n}, r = {r}"
                )));
            }
            exact_candidates(&ctx)
        }
        Mode::Sampled {
            samples,
            seed,
            local_search,
        } => {
            if samples == 0 {
                return Err(Error::invalid("sampled mode needs at least one sample"));
            }
            let found: Vec<(f64, (Labels, usize))> = (0..samples)
                .into_par_iter()
                .map(|i| sample_one(&ctx, seed.stream(i as u64), i == 0, local_search))
                .collect();
            let mut acc = Scored::new();
            for (s, w) in found {
                acc.offer(s, || w);
            }
            acc.into_candidates()
        }
    };
    let kind = PropertyKind {
        family,
        pattern: h.clone(),
        p: p.clone(),
    };
    let reports = cands
        .into_iter()
        .map(|(labels, pi_idx)| {
            let mut parts = ctx.parts(&labels);
            let (permutation, pmode) = match family {
                Family::Partite => (None, PartiteMode::Averaged),
                _ => {
                    let best = ctx.perms[pi_idx].clone();
                    match fixed_pi {
                        Some(pi) if !matches!(mode, Mode::Sampled { .. }) => {
                            // Relabel parts so that the maximising π' reads as π.
                            let mut moved = parts.clone();
                            for v in 0..r {
                                moved[pi[v]] = parts[best[v]].clone();
                            }
                            parts = moved;
                            (Some(pi.to_vec()), PartiteMode::Ordered(pi.to_vec()))
                        }
                        _ => (Some(best.clone()), PartiteMode::Ordered(best)),
                    }
                }
            };
            let count = count_partite(h, g, &parts, &pmode)?;
            Ok(DefectReport::for_parts(
                kind.clone(),
                g,
                parts,
                permutation,
                count,
                mode,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(pick_max(reports))
}

/// All partitions into `r` labelled-by-first-appearance parts plus an unused
/// class. Both Q and the maximum of R over all `π` are invariant under
/// renaming parts, so one representative per class suffices.
fn exact_candidates(ctx: &Ctx<'_>) -> Vec<(Labels, usize)> {
    let n = ctx.g.n();
    let r = ctx.h.r() as u8;
    let k = n.min(PREFIX_VERTICES);
    let mut prefixes = Vec::new();
    grow(&mut vec![0; n], 0, k, 0, r, &mut |l| {
        prefixes.push(l.to_vec())
    });
    let shards: Vec<Scored<(Labels, usize)>> = prefixes
        .into_par_iter()
        .map(|mut labels| {
            let mut acc = Scored::new();
            let used = labels[..k].iter().copied().max().unwrap_or(0);
            grow(&mut labels, k, n, used, r, &mut |l| {
                if l.iter().copied().max() == Some(r) {
                    let (s, pi) = ctx.score(l);
                    acc.offer(s, || (l.to_vec(), pi));
                }
            });
            acc
        })
        .collect();
    shards
        .into_iter()
        .fold(Scored::new(), Scored::merge)
        .into_candidates()
}

/// Restricted-growth labelling of positions `pos..end`.
fn grow(labels: &mut Vec<u8>, pos: usize, end: usize, used: u8, r: u8, f: &mut impl FnMut(&[u8])) {
    if pos == end {
        f(labels);
        return;
    }
    for l in 0..=(used + 1).min(r) {
        labels[pos] = l;
        grow(labels, pos + 1, end, used.max(l), r, f);
    }
    labels[pos] = 0;
}

fn sample_one(
    ctx: &Ctx<'_>,
    mut rng: rand_chacha::ChaCha8Rng,
    first: bool,
    local_search: bool,
) -> (f64, (Labels, usize)) {
    let n = ctx.g.n();
    let r = ctx.h.r() as u8;
    let mut labels: Labels = if first {
        (0..n).map(|v| (v % r as usize) as u8 + 1).collect()
    } else {
        let rho: f64 = rng.gen_range(0.2..1.0);
        (0..n)
            .map(|_| {
                if rng.gen::<f64>() < rho {
                    rng.gen_range(1..=r)
                } else {
                    0
                }
            })
            .collect()
    };
    let mut best = ctx.score(&labels);
    if local_search {
        for _ in 0..5 * n {
            let v = rng.gen_range(0..n);
            let old = labels[v];
            let new = (old + rng.gen_range(1..=r)) % (r + 1);
            labels[v] = new;
            let s = ctx.score(&labels);
            if s.0 > best.0 {
                best = s;
            } else {
                labels[v] = old;
            }
        }
    }
    (best.0, (labels, best.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{gen_gnp, Seed};
    use crate::properties::{defect_hereditary, Witness};
    use crate::scalar::{parse_scalar, Rational};

    fn brute_q(g: &Graph, h: &Pattern, p: &Rational, family: Family) -> Rational {
        // All ordered labelings 0..=r per vertex.
        let n = g.n();
        let r = h.r();
        let mut best = Rational::from_integer(0.into());
        let total = (r + 1).pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let mut parts = vec![VertexSet::empty(n); r];
            for v in 0..n {
                let l = c % (r + 1);
                c /= r + 1;
                if l > 0 {
                    parts[l - 1].insert(v);
                }
            }
            let kind = PropertyKind {
                family,
                pattern: h.clone(),
                p: p.clone(),
            };
            let reps: Vec<DefectReport<Rational>> = match family {
                Family::Partite => {
                    let c = count_partite(h, g, &parts, &PartiteMode::Averaged).unwrap();
                    vec![DefectReport::for_parts(
                        kind,
                        g,
                        parts,
                        None,
                        c,
                        Mode::Exact,
                    )]
                }
                _ => {
                    let mut v = Vec::new();
                    for_each_permutation(r, |pi| {
                        let c = count_partite(h, g, &parts, &PartiteMode::Ordered(pi.to_vec()))
                            .unwrap();
                        v.push(DefectReport::for_parts(
                            kind.clone(),
                            g,
                            parts.clone(),
                            Some(pi.to_vec()),
                            c,
                            Mode::Exact,
                        ));
                    });
                    v
                }
            };
            for rep in reps {
                if rep.defect > best {
                    best = rep.defect;
                }
            }
        }
        best
    }

    #[test]
    fn exact_matches_ordered_brute_force() {
        let p: Rational = parse_scalar("1/2").unwrap();
        for seed in 0..2 {
            let g = gen_gnp(6, 0.5, Seed(seed)).unwrap();
            for h in [Pattern::complete(3), Pattern::path(3)] {
                let q = defect_partite(&g, &h, &p, Mode::Exact).unwrap();
                assert_eq!(q.defect, brute_q(&g, &h, &p, Family::Partite));
                assert!(q.verify(&g).unwrap());
                let rr = defect_ordered_partite(&g, &h, &p, None, Mode::Exact).unwrap();
                assert_eq!(rr.defect, brute_q(&g, &h, &p, Family::OrderedPartite));
                assert!(rr.verify(&g).unwrap());
                let fixed =
                    defect_ordered_partite(&g, &h, &p, Some(&[1, 2, 0]), Mode::Exact).unwrap();
                assert_eq!(fixed.defect, rr.defect);
                assert!(fixed.verify(&g).unwrap());
                match &fixed.witness {
                    Witness::Parts { permutation, .. } => {
                        assert_eq!(permutation.as_deref(), Some(&[1, 2, 0][..]))
                    }
                    _ => panic!("expected parts"),
                }
            }
        }
    }

    #[test]
    fn clique_on_r_vertices_has_zero_singleton_deviation() {
        let g = Graph::complete(3);
        let parts: Vec<_> = (0..3).map(|i| VertexSet::from_indices(3, [i])).collect();
        let c = count_partite(&Pattern::complete(3), &g, &parts, &PartiteMode::Averaged).unwrap();
        let kind = PropertyKind {
            family: Family::Partite,
            pattern: Pattern::complete(3),
            p: 1.0f64,
        };
        assert_eq!(
            DefectReport::for_parts(kind, &g, parts, None, c, Mode::Exact).defect,
            0.0
        );
        assert!(defect_partite(
            &Graph::complete(2),
            &Pattern::complete(3),
            &0.5f64,
            Mode::Exact
        )
        .is_err());
    }

    #[test]
    fn easy_and_r_to_q_inequalities() {
        let p: Rational = parse_scalar("1/2").unwrap();
        for seed in 0..4 {
            let g = gen_gnp(8, 0.45, Seed(seed)).unwrap();
            let h = Pattern::complete(3);
            let q = defect_partite(&g, &h, &p, Mode::Exact).unwrap().defect;
            let star = defect_hereditary(&g, &h, &p, Mode::Exact).unwrap().defect;
            let rr = defect_ordered_partite(&g, &h, &p, None, Mode::Exact)
                .unwrap()
                .defect;
            assert!(q <= star * Rational::from_integer(7.into()));
            assert!(q <= rr * Rational::from_integer(6.into()));
        }
    }

    #[test]
    fn sampled_partite_is_deterministic_and_honest() {
        let g = gen_gnp(30, 0.5, Seed(3)).unwrap();
        let h = Pattern::complete(3);
        let mode = Mode::Sampled {
            samples: 6,
            seed: Seed(7),
            local_search: true,
        };
        let a = defect_partite(&g, &h, &0.5f64, mode).unwrap();
        let b = defect_partite(&g, &h, &0.5f64, mode).unwrap();
        assert_eq!(a.witness, b.witness);
        assert!(a.verify(&g).unwrap());
        let rr = defect_ordered_partite(&g, &h, &0.5f64, Some(&[0, 1, 2]), mode).unwrap();
        assert!(rr.verify(&g).unwrap());
    }
}
