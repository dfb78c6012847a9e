//! Homomorphism densities into weighted templates and the two-block
//! `ε`-polynomial.
//!
//! The two-block template has loops of weight `p - ε` and a cross edge of
//! weight `p + ε`. Mapping each pattern vertex to a sign `σ ∈ {±1}` uniformly,
//! an edge contributes `p + X_e ε` with `X_e = -σ_u σ_v`, so `X_e = -1` exactly
//! when both ends land in the same block.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generate::{expand_template, Seed};
use crate::graph::Graph;
use crate::pattern::Pattern;
use crate::properties::{defect_global, defect_hereditary, DefectReport, Mode};
use crate::scalar::{format_rational, Rational, Scalar};
use crate::template::WeightedTemplate;

/// Cap on the number of maps `k^r` enumerated by [`hom_density_weighted`].
pub const MAX_TEMPLATE_MAPS: u64 = 10_000_000;

/// `Σ_φ ∏_v μ(φ(v)) ∏_{uv ∈ E(H)} w(φ(u), φ(v))` with block measure
/// `μ(i) = |V_i| / Σ|V_j|`; uniform blocks give `k^{-r} Σ_φ ∏ w`.
///
/// Partial sums are taken per image of vertex 0 and added in block order, so
/// the result does not depend on the thread count.
pub fn hom_density_weighted<T: Scalar>(h: &Pattern, t: &WeightedTemplate<T>) -> Result<T> {
    let k = t.k();
    let r = h.r();
    let maps = (k as u64)
        .checked_pow(r as u32)
        .filter(|&m| m <= MAX_TEMPLATE_MAPS);
    if maps.is_none() {
        return Err(Error::ExactLimit(format!(
            "{k}^{r} template maps exceed {MAX_TEMPLATE_MAPS}"
        )));
    }
    let total = T::of_usize(t.total_vertices());
    let mu: Vec<T> = t
        .block_sizes()
        .iter()
        .map(|&s| T::of_usize(s) / total.clone())
        .collect();
    // Edges to earlier vertices, so a partial map can be weighted as it grows.
    let back: Vec<Vec<usize>> = (0..r)
        .map(|v| (0..v).filter(|&u| h.has_edge(u, v)).collect())
        .collect();
    if r == 0 {
        return Ok(T::one());
    }
    let partial: Vec<T> = (0..k)
        .into_par_iter()
        .map(|first| {
            let mut phi = vec![0usize; r];
            phi[0] = first;
            grow(t, &mu, &back, &mut phi, 1, mu[first].clone())
        })
        .collect();
    Ok(partial.into_iter().fold(T::zero(), |a, b| a + b))
}

fn grow<T: Scalar>(
    t: &WeightedTemplate<T>,
    mu: &[T],
    back: &[Vec<usize>],
    phi: &mut [usize],
    pos: usize,
    acc: T,
) -> T {
    if pos == phi.len() {
        return acc;
    }
    let mut sum = T::zero();
    for i in 0..t.k() {
        let mut w = acc.clone() * mu[i].clone();
        for &u in &back[pos] {
            w = w * t.weight(phi[u], i).clone();
        }
        if w.is_zero() {
            continue;
        }
        phi[pos] = i;
        sum = sum + grow(t, mu, back, phi, pos + 1, w);
    }
    sum
}

/// Dense polynomial in `ε`; `coeffs[i]` multiplies `ε^i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<T> {
    pub coeffs: Vec<T>,
}

pub type EpsPolynomial = Polynomial<Rational>;

impl<T: Scalar> Polynomial<T> {
    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    /// `a + b ε`.
    pub fn linear(a: T, b: T) -> Self {
        Polynomial { coeffs: vec![a, b] }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::zero();
        }
        let mut c = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] = c[i + j].clone() + a.clone() * b.clone();
            }
        }
        Polynomial { coeffs: c }
    }

    pub fn add_scaled(&mut self, other: &Self, s: &T) {
        if self.coeffs.len() < other.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), T::zero());
        }
        for (i, b) in other.coeffs.iter().enumerate() {
            self.coeffs[i] = self.coeffs[i].clone() + s.clone() * b.clone();
        }
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut out = Polynomial {
            coeffs: vec![T::one()],
        };
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    /// Index of the highest nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    /// Smallest `i ≥ from` with a nonzero coefficient.
    pub fn first_nonzero_from(&self, from: usize) -> Option<usize> {
        (from..self.coeffs.len()).find(|&i| !self.coeffs[i].is_zero())
    }

    /// Lagrange interpolation through distinct points.
    pub fn interpolate(points: &[(T, T)]) -> Result<Self> {
        let mut out = Self::zero();
        for (i, (xi, yi)) in points.iter().enumerate() {
            let mut basis = Polynomial {
                coeffs: vec![T::one()],
            };
            let mut denom = T::one();
            for (j, (xj, _)) in points.iter().enumerate() {
                if i == j {
                    continue;
                }
                if xi == xj {
                    return Err(Error::invalid("interpolation points must be distinct"));
                }
                basis = basis.mul(&Polynomial::linear(-xj.clone(), T::one()));
                denom = denom * (xi.clone() - xj.clone());
            }
            out.add_scaled(&basis, &(yi.clone() / denom));
        }
        Ok(out)
    }
}

/// `2^{-r} Σ_σ ∏_e (p + X_e ε)`. Maps are grouped by their number `s` of
/// same-block edges, each group contributing `(p-ε)^s (p+ε)^{m-s}`.
pub fn epsilon_polynomial<T: Scalar>(h: &Pattern, p: &T) -> Result<Polynomial<T>> {
    let r = h.r();
    if r > crate::pattern::MAX_PATTERN_VERTICES {
        return Err(Error::invalid(format!(
            "pattern on {r} vertices exceeds the limit"
        )));
    }
    let m = h.m();
    let mut by_same = vec![0u64; m + 1];
    for sigma in 0u32..1 << r {
        let same = h
            .edges()
            .iter()
            .filter(|&&(u, v)| (sigma >> u & 1) == (sigma >> v & 1))
            .count();
        by_same[same] += 1;
    }
    let lo = Polynomial::linear(p.clone(), -T::one());
    let hi = Polynomial::linear(p.clone(), T::one());
    let mut out = Polynomial::zero();
    let scale = T::one() / T::from_count(1u128 << r);
    for (s, &count) in by_same.iter().enumerate() {
        if count > 0 {
            let term = lo.pow(s).mul(&hi.pow(m - s));
            out.add_scaled(&term, &(T::from_count(count as u128) * scale.clone()));
        }
    }
    out.coeffs.resize(m + 1, T::zero());
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct GirthReport<T> {
    pub pattern: Pattern,
    pub p: T,
    pub girth: usize,
    pub polynomial: Polynomial<T>,
    /// Coefficients `1..g` are all zero.
    pub vanishes: bool,
    pub first_nonzero: Option<usize>,
}

pub fn check_girth_vanishing<T: Scalar>(h: &Pattern, p: &T) -> Result<GirthReport<T>> {
    let girth = h
        .girth()
        .ok_or_else(|| Error::invalid(format!("pattern {h} is a forest; girth undefined")))?;
    let polynomial = epsilon_polynomial(h, p)?;
    let vanishes = (1..girth).all(|i| polynomial.coeff(i).is_zero());
    let first_nonzero = polynomial.first_nonzero_from(1);
    Ok(GirthReport {
        pattern: h.clone(),
        p: p.clone(),
        girth,
        polynomial,
        vanishes,
        first_nonzero,
    })
}

fn scalar_text<T: Scalar>(x: &T) -> String {
    if T::EXACT {
        format_rational(&x.to_exact())
    } else {
        x.to_string()
    }
}

impl<T: Scalar> GirthReport<T> {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "pattern": self.pattern.name(),
            "p": scalar_text(&self.p),
            "coeffs": self.polynomial.coeffs.iter().map(scalar_text).collect::<Vec<_>>(),
            "girth": self.girth,
            "first_nonzero": self.first_nonzero,
            "first_nonzero_value": self.first_nonzero.map(|i| scalar_text(&self.polynomial.coeffs[i])),
            "vanishes": self.vanishes,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TemplateDefect {
    /// `P_{H,p}` defect of the whole graph.
    pub global: DefectReport<f64>,
    /// Sampled edge `P*` defect.
    pub edge_hereditary: DefectReport<f64>,
    /// Edge `P*` deviation of the block `V1` alone.
    pub block_defect: f64,
    /// `e(V1) / C(|V1|, 2)`.
    pub block_density: f64,
}

/// Blows the two-block template up to `n` vertices and measures the `H`
/// count defect against the edge-hereditary defect.
pub fn empirical_template_defect(
    h: &Pattern,
    p: f64,
    eps: f64,
    n: usize,
    seed: Seed,
    samples: usize,
) -> Result<TemplateDefect> {
    if n % 2 != 0 || n < 4 {
        return Err(Error::invalid(format!(
            "template blow-up needs an even n >= 4, got {n}"
        )));
    }
    let t = WeightedTemplate::two_block(p, eps, n / 2)?;
    let planted = expand_template(&t, seed)?;
    let g: &Graph = &planted.graph;
    let global = defect_global(g, h, &p)?;
    let k2 = Pattern::complete(2);
    let mode = Mode::Sampled {
        samples,
        seed,
        local_search: true,
    };
    let edge_hereditary = defect_hereditary(g, &k2, &p, mode)?;
    let v1 = planted.layout.block(0, n);
    let e1 = g.edges_within(&v1) as f64;
    let s = v1.len() as f64;
    let block_defect = (2.0 * e1 - p * s * s).abs() / (n * n) as f64;
    let block_density = e1 / (s * (s - 1.0) / 2.0);
    Ok(TemplateDefect {
        global,
        edge_hereditary,
        block_defect,
        block_density,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_scalar;

    fn rat(s: &str) -> Rational {
        parse_scalar(s).unwrap()
    }

    fn two_block(p: &Rational, e: &Rational) -> WeightedTemplate<Rational> {
        let lo = p.clone() - e.clone();
        let hi = p.clone() + e.clone();
        WeightedTemplate::uniform(vec![vec![lo.clone(), hi.clone()], vec![hi, lo]]).unwrap()
    }

    #[test]
    fn template_density_examples() {
        let k2 = Pattern::complete(2);
        let t = WeightedTemplate::uniform(vec![vec![rat("2/7")]]).unwrap();
        assert_eq!(hom_density_weighted(&k2, &t).unwrap(), rat("2/7"));
        let id =
            WeightedTemplate::uniform(vec![vec![rat("1"), rat("0")], vec![rat("0"), rat("1")]])
                .unwrap();
        assert_eq!(
            hom_density_weighted(&Pattern::complete(3), &id).unwrap(),
            rat("1/4")
        );
        let flat = two_block(&rat("1/2"), &rat("0"));
        assert_eq!(
            hom_density_weighted(&Pattern::cycle(4), &flat).unwrap(),
            rat("1/16")
        );
        // Unequal blocks weight maps by block measure.
        let skew = WeightedTemplate::new(
            vec![vec![rat("1"), rat("0")], vec![rat("0"), rat("0")]],
            vec![1, 3],
        )
        .unwrap();
        assert_eq!(hom_density_weighted(&k2, &skew).unwrap(), rat("1/16"));
    }

    /// `t_{C4}` of a `2×2` template is `Σ λ⁴` over the eigenvalues of the
    /// half-scaled weight matrix, which are `p` and `-ε`.
    #[test]
    fn four_cycle_spectral_identity() {
        for p in ["1/3", "1/2", "2/3", "1/5", "7/9"] {
            let p = rat(p);
            let poly = epsilon_polynomial(&Pattern::cycle(4), &p).unwrap();
            let mut want = vec![rat("0"); 5];
            want[0] = p.clone() * p.clone() * p.clone() * p.clone();
            want[4] = rat("1");
            assert_eq!(poly.coeffs, want);
        }
    }

    #[test]
    fn polynomial_matches_template_evaluation() {
        let p = rat("2/5");
        for h in [
            Pattern::cycle(4),
            Pattern::cycle(5),
            Pattern::complete(3),
            Pattern::complete_bipartite(2, 3),
            Pattern::path(4),
        ] {
            let poly = epsilon_polynomial(&h, &p).unwrap();
            let pts: Vec<(Rational, Rational)> = (0..=h.m())
                .map(|i| {
                    let e = rat(&format!("{}/{}", i, 3 * h.m() + 1));
                    (
                        e.clone(),
                        hom_density_weighted(&h, &two_block(&p, &e)).unwrap(),
                    )
                })
                .collect();
            for (e, y) in &pts {
                assert_eq!(&poly.eval(e), y, "{h}");
            }
            let mut again = Polynomial::interpolate(&pts).unwrap();
            again.coeffs.resize(h.m() + 1, rat("0"));
            assert_eq!(again, poly, "{h}");
        }
    }

    #[test]
    fn forests_are_constant() {
        let p = rat("3/7");
        for h in [
            Pattern::path(2),
            Pattern::path(5),
            Pattern::new("star", 4, &[(0, 1), (0, 2), (0, 3)]).unwrap(),
        ] {
            let poly = epsilon_polynomial(&h, &p).unwrap();
            assert_eq!(poly.degree(), Some(0));
            assert_eq!(poly.coeff(0), p.powu(h.m() as u32));
            assert!(check_girth_vanishing(&h, &p).is_err());
        }
    }

    #[test]
    fn girth_vanishing_examples() {
        let p = rat("1/2");
        let c4 = check_girth_vanishing(&Pattern::cycle(4), &p).unwrap();
        assert!(c4.vanishes);
        assert_eq!(c4.first_nonzero, Some(4));
        assert_eq!(c4.polynomial.coeff(4), rat("1"));
        let c6 = check_girth_vanishing(&Pattern::cycle(6), &p).unwrap();
        assert_eq!(
            (c6.first_nonzero, c6.polynomial.coeff(6)),
            (Some(6), rat("1"))
        );
        for h in [
            Pattern::complete_bipartite(3, 3),
            Pattern::complete(3),
            Pattern::complete(4),
            Pattern::cycle(8),
            Pattern::petersen(),
        ] {
            let rep = check_girth_vanishing(&h, &p).unwrap();
            assert!(rep.vanishes, "{h}");
            assert!(rep.first_nonzero.unwrap() >= rep.girth);
        }
        let k3 = check_girth_vanishing(&Pattern::complete(3), &p).unwrap();
        assert_eq!(k3.polynomial.coeff(3), rat("-1"));
        let json = c4.to_json();
        assert_eq!(json["coeffs"][0], "1/16");
        assert_eq!(json["first_nonzero"], 4);
    }

    #[test]
    fn cap_is_enforced() {
        let t = WeightedTemplate::uniform(vec![vec![0.5; 6]; 6]).unwrap();
        assert!(hom_density_weighted(&Pattern::petersen(), &t).is_err());
    }

    #[test]
    fn empirical_separation() {
        let rep = empirical_template_defect(&Pattern::cycle(4), 0.5, 0.2, 160, Seed(5), 8).unwrap();
        assert!(rep.block_defect >= 0.2 / 8.0);
        assert!(rep.edge_hereditary.defect >= rep.block_defect * 0.9);
        assert!((rep.block_density - 0.3).abs() < 0.05);
        assert!(rep.global.defect < 0.03);
        assert!(empirical_template_defect(&Pattern::cycle(4), 0.5, 0.2, 161, Seed(5), 8).is_err());
    }
}
