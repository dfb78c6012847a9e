//! Maximisation of `sign · (e(A', B') - q |A'| |B'|)` over `A' ⊆ X`,
//! `B' ⊆ Y \ A'`. For a fixed `A'` the best `B'` takes exactly the vertices
//! whose own contribution is positive, so only one side is searched.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::generate::Seed;
use crate::graph::Graph;
use crate::properties::Scored;
use crate::scalar::Scalar;
use crate::vertex_set::VertexSet;

/// Largest `|X|` (single set) or smaller side (pair) enumerated exhaustively.
pub(crate) const ENUM_MAX: usize = 24;

pub(crate) struct Objective<'a, T> {
    pub g: &'a Graph,
    pub x: &'a VertexSet,
    pub y: &'a VertexSet,
    pub q: &'a T,
    /// `+1` looks for dense subpairs, `-1` for sparse ones.
    pub sign: i8,
}

pub(crate) struct Found<T> {
    pub value: T,
    pub a: VertexSet,
    pub b: VertexSet,
}

impl<T: Scalar> Objective<'_, T> {
    fn qf(&self) -> f64 {
        self.q.as_f64()
    }

    /// Exact value of a pair.
    pub fn value(&self, a: &VertexSet, b: &VertexSet) -> T {
        let e = T::from_count(self.g.edges_between(a, b) as u128);
        let v = e - self.q.clone() * T::of_usize(a.len()) * T::of_usize(b.len());
        if self.sign > 0 {
            v
        } else {
            -v
        }
    }

    /// Best `B' ⊆ avail` for fixed `a`, decided in `T`.
    pub fn respond(&self, a: &VertexSet, avail: &VertexSet) -> VertexSet {
        let qa = self.q.clone() * T::of_usize(a.len());
        let n = self.g.n();
        VertexSet::from_indices(
            n,
            avail.iter().filter(|&v| {
                let c = T::of_usize(a.count_in(self.g.row(v))) - qa.clone();
                if self.sign > 0 {
                    c > T::zero()
                } else {
                    c < T::zero()
                }
            }),
        )
    }

    fn respond_f64(&self, a: &VertexSet, avail: &VertexSet) -> VertexSet {
        let qa = self.qf() * a.len() as f64;
        let s = self.sign as f64;
        VertexSet::from_indices(
            self.g.n(),
            avail
                .iter()
                .filter(|&v| s * (a.count_in(self.g.row(v)) as f64 - qa) > 0.0),
        )
    }

    fn finish(&self, a: VertexSet) -> Found<T> {
        let b = self.respond(&a, &self.y.difference(&a));
        // Symmetric step: the exact response on the other side never lowers the value.
        let a2 = self.respond(&b, &self.x.difference(&b));
        let (a, b) = if self.value(&a2, &b) > self.value(&a, &b) {
            (a2, b)
        } else {
            (a, b)
        };
        Found {
            value: self.value(&a, &b),
            a,
            b,
        }
    }

    /// Exhaustive search. `X` and `Y` are either equal or disjoint; in the
    /// disjoint case the smaller side is enumerated.
    pub fn exhaustive(&self) -> Found<T> {
        let swapped = self.x.is_disjoint(self.y) && self.y.len() < self.x.len();
        let (x, y) = if swapped {
            (self.y, self.x)
        } else {
            (self.x, self.y)
        };
        let xs = x.to_vec();
        let ys = y.to_vec();
        assert!(xs.len() <= ENUM_MAX, "exhaustive side too large");
        let adj: Vec<Vec<usize>> = xs
            .iter()
            .map(|&u| {
                ys.iter()
                    .enumerate()
                    .filter(|&(_, &v)| self.g.has_edge(u, v))
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect();
        let pos_in_x: Vec<Option<usize>> =
            ys.iter().map(|v| xs.iter().position(|u| u == v)).collect();
        let q = self.qf();
        let s = self.sign as f64;
        let mut deg = vec![0i64; ys.len()];
        let mut mask = 0u64;
        let mut a_size = 0usize;
        let mut acc = Scored::new();
        let eval = |deg: &[i64], mask: u64, a_size: usize| -> f64 {
            let qa = q * a_size as f64;
            let mut t = 0.0;
            for (j, &d) in deg.iter().enumerate() {
                if pos_in_x[j].is_some_and(|i| mask >> i & 1 == 1) {
                    continue;
                }
                let c = s * (d as f64 - qa);
                if c > 0.0 {
                    t += c;
                }
            }
            t
        };
        acc.offer(eval(&deg, 0, 0), || 0u64);
        for i in 1u64..1 << xs.len() {
            let k = i.trailing_zeros() as usize;
            let delta = if mask >> k & 1 == 1 { -1 } else { 1 };
            mask ^= 1 << k;
            a_size = (a_size as i64 + delta) as usize;
            for &j in &adj[k] {
                deg[j] += delta;
            }
            acc.offer(eval(&deg, mask, a_size), || mask);
        }
        let n = self.g.n();
        let best = acc
            .into_candidates()
            .into_iter()
            .map(|m| {
                let a = VertexSet::from_indices(
                    n,
                    xs.iter()
                        .enumerate()
                        .filter(|&(i, _)| m >> i & 1 == 1)
                        .map(|(_, &v)| v),
                );
                let b = self.respond(&a, &y.difference(&a));
                Found {
                    value: self.value(&a, &b),
                    a,
                    b,
                }
            })
            .reduce(|p, c| if c.value > p.value { c } else { p })
            .expect("at least the empty set");
        if swapped {
            Found {
                value: best.value,
                a: best.b,
                b: best.a,
            }
        } else {
            best
        }
    }

    fn climb(&self, mut a: VertexSet) -> VertexSet {
        let mut last = f64::NEG_INFINITY;
        for _ in 0..64 {
            let b = self.respond_f64(&a, &self.y.difference(&a));
            let a2 = self.respond_f64(&b, &self.x.difference(&b));
            let v = self.value(&a2, &b).as_f64();
            a = a2;
            if v <= last {
                break;
            }
            last = v;
        }
        a
    }

    /// Start from the quarter of `Y` most (or least) attached to `X`.
    fn degree_split_start(&self) -> VertexSet {
        let mut ys: Vec<(usize, usize)> = self
            .y
            .iter()
            .map(|v| (self.x.count_in(self.g.row(v)), v))
            .collect();
        if self.sign > 0 {
            ys.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        } else {
            ys.sort();
        }
        let quarter = ys.len().div_ceil(4);
        let b = VertexSet::from_indices(self.g.n(), ys[..quarter].iter().map(|&(_, v)| v));
        self.respond_f64(&b, &self.x.difference(&b))
    }

    /// Alternating best responses from the degree split and, if `restarts > 0`,
    /// from seeded random subsets. Results are reduced by exact value, then by
    /// the smaller witness.
    pub fn heuristic(&self, restarts: usize, seed: Seed) -> Found<T> {
        let xs = self.x.to_vec();
        let n = self.g.n();
        let starts: Vec<Option<usize>> = std::iter::once(None)
            .chain((0..restarts).map(Some))
            .collect();
        let found: Vec<Found<T>> = starts
            .into_par_iter()
            .map(|st| {
                let a = match st {
                    None => self.degree_split_start(),
                    Some(i) => {
                        let mut rng = seed.stream(i as u64);
                        let rho: f64 = rng.gen_range(0.1..0.9);
                        let mut pick: Vec<usize> = xs
                            .iter()
                            .copied()
                            .filter(|_| rng.gen::<f64>() < rho)
                            .collect();
                        pick.shuffle(&mut rng);
                        VertexSet::from_indices(n, pick)
                    }
                };
                self.finish(self.climb(a))
            })
            .collect();
        found
            .into_iter()
            .reduce(|p, c| {
                if c.value > p.value || (c.value == p.value && (&c.a, &c.b) < (&p.a, &p.b)) {
                    c
                } else {
                    p
                }
            })
            .expect("degree-split start always present")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::gen_gnp;
    use crate::scalar::{parse_scalar, Rational};

    fn brute(obj: &Objective<'_, Rational>) -> Rational {
        let xs = obj.x.to_vec();
        let ys = obj.y.to_vec();
        let n = obj.g.n();
        let mut best = Rational::from_integer(0.into());
        for ma in 0u32..1 << xs.len() {
            let a = VertexSet::from_indices(
                n,
                (0..xs.len()).filter(|i| ma >> i & 1 == 1).map(|i| xs[i]),
            );
            for mb in 0u32..1 << ys.len() {
                let b = VertexSet::from_indices(
                    n,
                    (0..ys.len()).filter(|i| mb >> i & 1 == 1).map(|i| ys[i]),
                );
                if !a.is_disjoint(&b) {
                    continue;
                }
                let v = obj.value(&a, &b);
                if v > best {
                    best = v;
                }
            }
        }
        best
    }

    #[test]
    fn exhaustive_matches_double_enumeration() {
        let q: Rational = parse_scalar("3/7").unwrap();
        for seed in 0..4 {
            let g = gen_gnp(14, 0.45, Seed(seed)).unwrap();
            let x = VertexSet::from_range(14, 0..5);
            let y = VertexSet::from_range(14, 5..12);
            let u = VertexSet::from_range(14, 3..11);
            for sign in [1, -1] {
                for (x, y) in [(&x, &y), (&y, &x), (&u, &u)] {
                    let obj = Objective {
                        g: &g,
                        x,
                        y,
                        q: &q,
                        sign,
                    };
                    let f = obj.exhaustive();
                    assert_eq!(f.value, brute(&obj));
                    assert_eq!(obj.value(&f.a, &f.b), f.value);
                    assert!(f.a.is_subset(x) && f.b.is_subset(y) && f.a.is_disjoint(&f.b));
                }
            }
        }
    }

    #[test]
    fn heuristic_never_beats_exhaustive() {
        let q: Rational = parse_scalar("1/2").unwrap();
        let g = gen_gnp(20, 0.5, Seed(9)).unwrap();
        let x = VertexSet::from_range(20, 0..10);
        let y = VertexSet::from_range(20, 10..20);
        for sign in [1, -1] {
            let obj = Objective {
                g: &g,
                x: &x,
                y: &y,
                q: &q,
                sign,
            };
            let h = obj.heuristic(8, Seed(1));
            assert!(h.value <= obj.exhaustive().value);
            assert_eq!(h.value, obj.value(&h.a, &h.b));
        }
    }
}
