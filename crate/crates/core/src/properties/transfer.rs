use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generate::Seed;
use crate::graph::Graph;
use crate::pattern::Pattern;
use crate::scalar::Scalar;
use crate::vertex_set::VertexSet;

use super::{defect_hereditary, Mode};

/// Largest graph accepted by [`counting_transfer_check`].
pub const TRANSFER_MAX_N: usize = 20;

#[derive(Clone, Debug, Serialize)]
pub struct TransferCheck<T> {
    pub r: usize,
    /// Exact edge-hereditary defect.
    pub gamma: T,
    /// Exact `K_r`-hereditary defect.
    pub rho: T,
    /// `rho / gamma`; absent when `gamma = 0`.
    pub ratio: Option<f64>,
    /// `rho ≤ r² gamma`, decided in `T`.
    pub holds: bool,
}

pub fn counting_transfer_check<T: Scalar>(g: &Graph, r: usize, p: &T) -> Result<TransferCheck<T>> {
    if g.n() > TRANSFER_MAX_N {
        return Err(Error::ExactLimit(format!(
            "transfer check needs n <= {TRANSFER_MAX_N}, got {}",
            g.n()
        )));
    }
    if r < 2 {
        return Err(Error::invalid("clique order must be at least 2"));
    }
    let gamma = defect_hereditary(g, &Pattern::complete(2), p, Mode::Exact)?.defect;
    let rho = defect_hereditary(g, &Pattern::complete(r), p, Mode::Exact)?.defect;
    let holds = rho <= T::of_usize(r * r) * gamma.clone();
    let ratio = (!gamma.is_zero()).then(|| rho.as_f64() / gamma.as_f64());
    Ok(TransferCheck {
        r,
        gamma,
        rho,
        ratio,
        holds,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EgpsResult {
    pub set: VertexSet,
    /// `|e(S') - q C(|S'|, 2)|` of the returned set.
    pub deviation: f64,
    /// Same quantity for the input set.
    pub initial_deviation: f64,
    /// One fifth of the initial deviation.
    pub target: f64,
    pub meets_threshold: bool,
    pub attempts: usize,
}

fn edge_deviation(edges: usize, size: usize, q: f64) -> f64 {
    let pairs = (size * size.saturating_sub(1) / 2) as f64;
    (edges as f64 - q * pairs).abs()
}

/// Edges from `v` into `s`.
fn degree_into(g: &Graph, s: &VertexSet, v: usize) -> usize {
    s.count_in(g.row(v))
}

/// A set of order `⌊n/2⌋` whose edge deviation from `q` keeps at least a fifth
/// of the deviation of `s`.
///
/// Attempt 0 is greedy: every step adds or removes the vertex that keeps the
/// deviation largest. Attempt `k ≥ 1` picks from a few random candidates using
/// stream `k` of `seed`. Each attempt then tries random swaps. The best set
/// over all attempts is returned, flagged if it misses the target.
pub fn egps_halve(
    g: &Graph,
    s: &VertexSet,
    q: f64,
    seed: Seed,
    retries: usize,
) -> Result<EgpsResult> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::invalid(format!("density {q} outside [0,1]")));
    }
    if s.universe() != g.n() {
        return Err(Error::invalid(
            "vertex set universe differs from graph order",
        ));
    }
    let n = g.n();
    let half = n / 2;
    let d0 = edge_deviation(g.edges_within(s), s.len(), q);
    if d0 <= 0.0 {
        return Err(Error::Precondition(
            "input set has zero edge deviation".into(),
        ));
    }
    let target = d0 / 5.0;
    if s.len() == half {
        return Ok(EgpsResult {
            set: s.clone(),
            deviation: d0,
            initial_deviation: d0,
            target,
            meets_threshold: true,
            attempts: 0,
        });
    }
    let mut best: Option<(f64, VertexSet)> = None;
    let mut attempts = 0;
    for k in 0..=retries {
        attempts += 1;
        let mut rng = seed.stream(k as u64);
        let (dev, set) = halve_once(g, s, q, half, if k == 0 { None } else { Some(&mut rng) });
        let (dev, set) = swap_phase(g, set, dev, q, &mut seed.stream(k as u64 + 1 << 32));
        if best.as_ref().map_or(true, |(b, _)| dev > *b) {
            best = Some((dev, set));
        }
        if best.as_ref().is_some_and(|(b, _)| *b >= target) {
            break;
        }
    }
    let (deviation, set) = best.expect("at least one attempt");
    Ok(EgpsResult {
        set,
        deviation,
        initial_deviation: d0,
        target,
        meets_threshold: deviation >= target,
        attempts,
    })
}

const RANDOM_CANDIDATES: usize = 6;

fn halve_once(
    g: &Graph,
    s: &VertexSet,
    q: f64,
    half: usize,
    mut rng: Option<&mut rand_chacha::ChaCha8Rng>,
) -> (f64, VertexSet) {
    let mut cur = s.clone();
    let mut edges = g.edges_within(s);
    let shrink = cur.len() > half;
    while cur.len() != half {
        let pool: Vec<usize> = if shrink {
            cur.to_vec()
        } else {
            cur.complement().to_vec()
        };
        let cands: Vec<usize> = match rng.as_deref_mut() {
            None => pool,
            Some(r) => pool
                .choose_multiple(r, RANDOM_CANDIDATES)
                .copied()
                .collect(),
        };
        let size = if shrink { cur.len() - 1 } else { cur.len() + 1 };
        let mut pick = (f64::NEG_INFINITY, cands[0], edges);
        for &v in &cands {
            let dv = degree_into(g, &cur, v);
            let e = if shrink { edges - dv } else { edges + dv };
            let dev = edge_deviation(e, size, q);
            if dev > pick.0 {
                pick = (dev, v, e);
            }
        }
        cur.toggle(pick.1);
        edges = pick.2;
    }
    (edge_deviation(edges, cur.len(), q), cur)
}

fn swap_phase(
    g: &Graph,
    mut set: VertexSet,
    mut dev: f64,
    q: f64,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> (f64, VertexSet) {
    let n = g.n();
    if set.is_empty() || set.len() == n {
        return (dev, set);
    }
    let mut edges = g.edges_within(&set);
    for _ in 0..4 * n {
        let inside = set.to_vec();
        let outside = set.complement().to_vec();
        let u = inside[rng.gen_range(0..inside.len())];
        let w = outside[rng.gen_range(0..outside.len())];
        let e = edges - degree_into(g, &set, u) + degree_into(g, &set, w)
            - usize::from(g.has_edge(u, w));
        let d = edge_deviation(e, set.len(), q);
        if d > dev {
            set.remove(u);
            set.insert(w);
            edges = e;
            dev = d;
        }
    }
    (dev, set)
}

#[derive(Clone, Debug, Serialize)]
pub struct SplitOutcome {
    pub x: VertexSet,
    pub y: VertexSet,
    pub e_x: usize,
    pub e_y: usize,
    /// `e(X) - e(Y)` after trimming to `|X| = |Y|`.
    pub gap: i64,
    /// `e(X) - e(Y)` before trimming.
    pub raw_gap: i64,
}

/// `A` keeps each vertex with probability 1/2, `X = S ∩ A` and `Y` keeps each
/// vertex of `V \ A` with probability 1/2, so `E[raw_gap] = e(S)/4 - e(G)/16`
/// exactly. The larger of `X`, `Y` then loses uniformly
/// random vertices until the two have equal order.
pub fn split_deviation_experiment(g: &Graph, s: &VertexSet, seed: Seed) -> Result<SplitOutcome> {
    let n = g.n();
    if s.universe() != n {
        return Err(Error::invalid(
            "vertex set universe differs from graph order",
        ));
    }
    let mut rng = seed.rng();
    let a = VertexSet::from_indices(n, (0..n).filter(|_| rng.gen::<bool>()));
    let mut x = s.intersection(&a);
    let rest = a.complement().to_vec();
    let mut y = VertexSet::from_indices(n, rest.into_iter().filter(|_| rng.gen::<bool>()));
    let raw_gap = g.edges_within(&x) as i64 - g.edges_within(&y) as i64;
    let (big, small) = if x.len() > y.len() {
        (&mut x, &y)
    } else {
        (&mut y, &x)
    };
    let mut members = big.to_vec();
    members.shuffle(&mut rng);
    for &v in &members[..members.len() - small.len()] {
        big.remove(v);
    }
    let e_x = g.edges_within(&x);
    let e_y = g.edges_within(&y);
    Ok(SplitOutcome {
        x,
        y,
        e_x,
        e_y,
        gap: e_x as i64 - e_y as i64,
        raw_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{build_four_block_counterexample, gen_gnp};
    use crate::scalar::{parse_scalar, Rational};

    #[test]
    fn transfer_closed_forms() {
        let half: Rational = parse_scalar("1/2").unwrap();
        let t = counting_transfer_check(&Graph::empty(10), 3, &half).unwrap();
        assert_eq!(t.gamma, half);
        assert_eq!(t.rho, parse_scalar::<Rational>("1/8").unwrap());
        assert!(t.holds);
        let one = Rational::from_integer(1.into());
        let t = counting_transfer_check(&Graph::complete(10), 3, &one).unwrap();
        assert_eq!(t.gamma, parse_scalar::<Rational>("1/10").unwrap());
        assert!(t.holds);
        assert!(counting_transfer_check(&Graph::empty(21), 3, &half).is_err());
    }

    #[test]
    fn transfer_on_random_graphs() {
        let half: Rational = parse_scalar("1/2").unwrap();
        for seed in 0..6 {
            let g = gen_gnp(11, [0.3, 0.5, 0.7][seed as usize % 3], Seed(seed)).unwrap();
            for r in [3, 4] {
                assert!(counting_transfer_check(&g, r, &half).unwrap().holds);
            }
        }
    }

    #[test]
    fn halving_keeps_half_size_sets() {
        let g = gen_gnp(12, 0.5, Seed(1)).unwrap();
        let s = VertexSet::from_range(12, 0..6);
        let res = egps_halve(&g, &s, 0.1, Seed(0), 3).unwrap();
        assert_eq!(res.set, s);
        assert!(res.meets_threshold);
    }

    #[test]
    fn halving_counterexample_dense_pair() {
        let planted = build_four_block_counterexample(16, Seed(1)).unwrap();
        let g = &planted.graph;
        let s = planted
            .layout
            .block(0, 16)
            .union(&planted.layout.block(1, 16))
            .union(&planted.layout.block(2, 16));
        let q = 2.0 * g.edge_count() as f64 / (16.0 * 15.0);
        let d0 = edge_deviation(g.edges_within(&s), s.len(), q);
        // Some 8-set reaches d0 / 5.
        let exists = (0u64..1 << 16).filter(|m| m.count_ones() == 8).any(|m| {
            let t = VertexSet::from_mask(16, m);
            edge_deviation(g.edges_within(&t), 8, q) >= d0 / 5.0
        });
        assert!(exists);
        let res = egps_halve(g, &s, q, Seed(5), 8).unwrap();
        assert_eq!(res.set.len(), 8);
        assert!(res.meets_threshold, "{res:?}");
        assert!((edge_deviation(g.edges_within(&res.set), 8, q) - res.deviation).abs() < 1e-9);
    }

    #[test]
    fn split_shapes() {
        let g = gen_gnp(40, 0.5, Seed(3)).unwrap();
        let out = split_deviation_experiment(&g, &VertexSet::empty(40), Seed(1)).unwrap();
        assert!(out.x.is_empty() && out.y.is_empty());
        assert_eq!(out.gap, 0);
        for seed in 0..20 {
            let s = VertexSet::from_range(40, 0..25);
            let out = split_deviation_experiment(&g, &s, Seed(seed)).unwrap();
            assert_eq!(out.x.len(), out.y.len());
            assert!(out.x.is_subset(&s));
            assert!(out.x.is_disjoint(&out.y));
            assert_eq!(out.gap, out.e_x as i64 - out.e_y as i64);
        }
    }

    #[test]
    fn raw_gap_is_unbiased() {
        let g = gen_gnp(24, 0.5, Seed(8)).unwrap();
        let s = VertexSet::from_range(24, 0..12);
        let target = g.edges_within(&s) as f64 / 4.0 - g.edge_count() as f64 / 16.0;
        let runs = 4000;
        let gaps: Vec<f64> = (0..runs)
            .map(|i| split_deviation_experiment(&g, &s, Seed(i)).unwrap().raw_gap as f64)
            .collect();
        let mean = gaps.iter().sum::<f64>() / runs as f64;
        let var = gaps.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (runs - 1) as f64;
        assert!(
            (mean - target).abs() < 4.0 * (var / runs as f64).sqrt(),
            "{mean} vs {target}"
        );
    }
}
