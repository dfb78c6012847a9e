//! Kruskal–Katona clique bound and the power-sum inequalities.

use num_bigint::BigInt;
use num_traits::{Float, One};

use crate::error::{Error, Result};
use crate::scalar::{exact_count, Rational, Scalar};

/// Real `x ≥ 1` with `C(x, 2) = e`.
pub fn kk_x<F: Float>(edge_count: u128) -> F {
    let e = F::from(edge_count).expect("representable edge count");
    let one = F::one();
    let two = one + one;
    let eight = two * two * two;
    (one + (one + eight * e).sqrt()) / two
}

/// Generalised binomial `x (x-1) ... (x-r+1) / r!`.
pub fn generalized_binomial<T: Scalar>(x: &T, r: usize) -> T {
    let mut acc = T::one();
    for i in 0..r {
        acc = acc * (x.clone() - T::of_usize(i)) / T::of_usize(i + 1);
    }
    acc
}

/// `C(x, r)` for the real `x` with `C(x, 2) = edge_count`; `None` when `x < r`,
/// where the bound does not apply.
pub fn kk_clique_upper_bound<F: Float + Scalar>(edge_count: u128, r: usize) -> Option<F> {
    let x = kk_x::<F>(edge_count);
    if x < F::of_usize(r) {
        return None;
    }
    Some(generalized_binomial(&x, r))
}

/// Rounding-free check of `cliques ≤ C(x, r)`.
///
/// Uses a rational `x_lo ≤ x` from an integer square root scaled by `2^64`;
/// `C(·, r)` is increasing on `[r-1, ∞)` so success certifies the bound.
/// Returns `None` when `x < r`.
pub fn kk_bound_holds(cliques: u128, edge_count: u128, r: usize) -> Option<bool> {
    let s = BigInt::from(1u8) + BigInt::from(8u8) * BigInt::from(edge_count);
    let scale = BigInt::one() << 64u32;
    let root_lo = (&s * &scale * &scale).sqrt();
    let x_lo = (Rational::from_integer(scale.clone())
        + Rational::new(root_lo.clone(), BigInt::one()))
        / Rational::from_integer(BigInt::from(2u8) * &scale);
    let x_hi = x_lo.clone() + Rational::new(BigInt::one(), BigInt::from(2u8) * &scale);
    if x_hi < Rational::from_integer(BigInt::from(r)) {
        return None;
    }
    let c = exact_count(cliques);
    if x_lo >= Rational::from_integer(BigInt::from(r)) && c <= generalized_binomial(&x_lo, r) {
        return Some(true);
    }
    if c > generalized_binomial(&x_hi, r) {
        return Some(false);
    }
    // Only reachable when the count sits within 2^-64 of the bound.
    let f = kk_clique_upper_bound::<f64>(edge_count, r)?;
    Some(cliques as f64 <= f * (1.0 + 1e-12))
}

/// `(Σ_{i,j} |b_j^s - a_i^s|, n Σ b^s - Σ b^{s-1} Σ a, Σ b^{s-1} (Σ b - Σ a))`.
pub fn power_sum_gap<T: Scalar>(a: &[T], b: &[T], s: u32) -> Result<(T, T, T)> {
    if a.len() != b.len() {
        return Err(Error::invalid("power-sum vectors differ in length"));
    }
    if s == 0 {
        return Err(Error::invalid("power must be a positive integer"));
    }
    if a.iter().chain(b).any(|v| *v < T::zero()) {
        return Err(Error::invalid("power-sum entries must be non-negative"));
    }
    let sum = |v: &[T]| v.iter().cloned().fold(T::zero(), |x, y| x + y);
    let a_s: Vec<T> = a.iter().map(|v| v.powu(s)).collect();
    let b_s: Vec<T> = b.iter().map(|v| v.powu(s)).collect();
    let b_s1: Vec<T> = b.iter().map(|v| v.powu(s - 1)).collect();
    let mut lhs = T::zero();
    for bj in &b_s {
        for ai in &a_s {
            lhs = lhs + (bj.clone() - ai.clone()).abs();
        }
    }
    let n = T::of_usize(a.len());
    let sa = sum(a);
    let sb = sum(b);
    let sb1 = sum(&b_s1);
    let rhs1 = n * sum(&b_s) - sb1.clone() * sa.clone();
    let rhs2 = sb1 * (sb - sa);
    Ok((lhs, rhs1, rhs2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::cliques::count_cliques;
    use crate::generate::{gen_gnp, Seed};
    use crate::graph::Graph;
    use num_traits::Zero;
    use proptest::prelude::*;

    #[test]
    fn kk_examples() {
        assert_eq!(kk_clique_upper_bound::<f64>(15, 3), Some(20.0));
        let k6 = Graph::complete(6);
        assert_eq!(count_cliques(&k6, &k6.all_vertices(), 3), 20);
        assert_eq!(kk_bound_holds(20, 15, 3), Some(true));
        assert_eq!(kk_bound_holds(21, 15, 3), Some(false));
        let x = 7.5f64;
        assert_eq!(generalized_binomial(&x, 3), 44.6875);
        assert_eq!(kk_clique_upper_bound::<f64>(28, 3), Some(56.0));
        assert_eq!(kk_clique_upper_bound::<f64>(2, 3), None);
        assert_eq!(kk_bound_holds(0, 2, 3), None);
    }

    #[test]
    fn sampled_six_vertex_graphs_obey_bound() {
        for seed in 0..500u64 {
            let g = gen_gnp(6, (seed % 10) as f64 / 9.0, Seed(seed)).unwrap();
            let e = g.edge_count() as u128;
            for r in 3..=4 {
                let c = count_cliques(&g, &g.all_vertices(), r);
                match kk_bound_holds(c, e, r) {
                    Some(ok) => assert!(ok, "seed {seed} r {r}"),
                    None => assert_eq!(c, 0),
                }
            }
        }
    }

    #[test]
    fn power_sum_hand_example() {
        let (lhs, rhs1, rhs2) = power_sum_gap(&[0.0f64, 0.0], &[1.0, 1.0], 2).unwrap();
        assert_eq!((lhs, rhs1, rhs2), (4.0, 4.0, 4.0));
        assert!(power_sum_gap(&[-1.0f64], &[1.0], 2).is_err());
        let v = [
            Rational::new(1.into(), 3.into()),
            Rational::new(2.into(), 1.into()),
        ];
        let (lhs, _, rhs2) = power_sum_gap(&v, &v, 3).unwrap();
        assert!(lhs >= rhs2);
        assert!(rhs2.is_zero());
    }

    proptest! {
        #[test]
        fn power_sum_inequalities(
            pairs in proptest::collection::vec((0u32..1000, 0u32..1000), 1..50),
            s in 1u32..=5,
        ) {
            let a: Vec<Rational> = pairs.iter().map(|&(x, _)| exact_count(x as u128)).collect();
            let b: Vec<Rational> = pairs.iter().map(|&(_, y)| exact_count(y as u128)).collect();
            let (lhs, rhs1, rhs2) = power_sum_gap(&a, &b, s).unwrap();
            prop_assert!(lhs >= rhs1);
            prop_assert!(lhs >= rhs2);
        }
    }
}
