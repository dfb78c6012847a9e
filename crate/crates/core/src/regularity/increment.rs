//! One density-increment step and the driver that iterates it.
//!
//! A step partitions `A` into `⌊r/2⌋` and `B` into `⌈r/2⌉` parts and searches
//! the cross pairs for lower-`(d(A,B), υ)` violations and the same-side pairs
//! for lower-`((1-α)p, υ)` violations (mirrored when `d(A,B) < p`). A violation
//! is turned into an equal-size pair whose relative deviation from `p` is at
//! least `(1+β)α`, and that inequality is checked in `T` before it is returned.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::counting::count_labeled_copies;
use crate::error::{Error, Result};
use crate::generate::Seed;
use crate::graph::Graph;
use crate::pattern::Pattern;
use crate::scalar::Scalar;
use crate::vertex_set::VertexSet;

use super::single::find_regular_subset;
use super::{
    check_pair, convert_witness, equalize_witness, find_irregularity_witness, pair_density,
    Direction, RegularityWitness, Strategy,
};

#[derive(Clone, Debug, PartialEq)]
pub struct IncrementParams<T> {
    pub p: T,
    pub m: usize,
    pub r: usize,
    /// `p^{m-1} / (4r³)`.
    pub gamma: T,
    /// `p^m α / (4r)`.
    pub upsilon: T,
    /// `10⁻⁵ α² p^{2m} / m²`.
    pub eta: T,
    /// `2mη p^{1-m}`.
    pub kappa: T,
}

impl<T: Scalar> IncrementParams<T> {
    pub fn new(h: &Pattern, p: &T, alpha: &T) -> Self {
        let (m, r) = (h.m(), h.r());
        let pm1 = p.powu(m as u32 - 1);
        let gamma = pm1.clone() / (T::of_usize(4) * T::of_usize(r).powu(3));
        let upsilon = p.powu(m as u32) * alpha.clone() / T::of_usize(4 * r);
        let eta =
            alpha.powu(2) * p.powu(2 * m as u32) / (T::of_usize(100_000) * T::of_usize(m * m));
        let kappa = T::of_usize(2 * m) * eta.clone() / pm1;
        IncrementParams {
            p: p.clone(),
            m,
            r,
            gamma,
            upsilon,
            eta,
            kappa,
        }
    }

    /// `1 / (16mr)`.
    pub fn alpha_limit(&self) -> T {
        T::one() / T::of_usize(16 * self.m * self.r)
    }

    /// `α m p^m r^{-r} (|A|/n)^r / (4r)`.
    pub fn delta_limit(&self, alpha: &T, size: usize, n: usize) -> T {
        let r = self.r as u32;
        alpha.clone()
            * T::of_usize(self.m)
            * self.p.powu(self.m as u32)
            * (T::of_usize(size) / T::of_usize(n)).powu(r)
            / (T::of_usize(4 * self.r) * T::of_usize(self.r).powu(r))
    }
}

#[derive(Clone, Debug)]
pub struct IncrementState<T> {
    pub a: VertexSet,
    pub b: VertexSet,
    pub density: T,
    /// `|d(A, B)/p - 1|`.
    pub alpha: T,
    pub iteration: usize,
    /// `γ |A_prev| / |A|` when produced by a step.
    pub beta: Option<T>,
    pub params: IncrementParams<T>,
}

fn check_pattern(h: &Pattern) -> Result<()> {
    if h.m() == 0 || h.has_isolated_vertex() {
        return Err(Error::invalid(format!(
            "pattern {h} must have edges and no isolated vertex"
        )));
    }
    Ok(())
}

impl<T: Scalar> IncrementState<T> {
    pub fn initial(g: &Graph, h: &Pattern, p: &T, a: VertexSet, b: VertexSet) -> Result<Self> {
        check_pattern(h)?;
        if *p <= T::zero() || *p >= T::one() {
            return Err(Error::invalid(format!(
                "reference density {p} outside (0,1)"
            )));
        }
        Self::at(g, h, p, a, b, 0, None)
    }

    fn at(
        g: &Graph,
        h: &Pattern,
        p: &T,
        a: VertexSet,
        b: VertexSet,
        iteration: usize,
        beta: Option<T>,
    ) -> Result<Self> {
        check_pair(&a, &b)?;
        if a.len() != b.len() {
            return Err(Error::invalid(format!(
                "increment pair needs |A| = |B|, got {} and {}",
                a.len(),
                b.len()
            )));
        }
        let density = pair_density::<T>(g, &a, &b);
        let alpha = (density.clone() / p.clone() - T::one()).abs();
        let params = IncrementParams::new(h, p, &alpha);
        Ok(IncrementState {
            a,
            b,
            density,
            alpha,
            iteration,
            beta,
            params,
        })
    }

    pub fn above(&self) -> bool {
        self.density >= self.params.p
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::json!({
            "iter": self.iteration,
            "size": self.a.len(),
            "density": self.density.as_f64(),
            "alpha": self.alpha.as_f64(),
            "beta": self.beta.as_ref().map(|b| b.as_f64()),
            "gamma": self.params.gamma.as_f64(),
            "upsilon": self.params.upsilon.as_f64(),
            "eta": self.params.eta.as_f64(),
            "kappa": self.params.kappa.as_f64(),
        });
        if T::EXACT {
            v["alpha_exact"] = self.alpha.to_exact().to_string().into();
        }
        v
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Precondition<T> {
    /// `α` must lie in `(0, 1/(16mr)]`.
    Alpha { alpha: T, limit: T },
    /// The measured `Q` defect must not exceed the lemma's bound.
    Delta { delta: T, limit: T },
}

impl<T: Scalar> Precondition<T> {
    pub fn label(&self) -> &'static str {
        match self {
            Precondition::Alpha { .. } => "alpha",
            Precondition::Delta { .. } => "delta",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "lowercase")]
pub enum StepBranch {
    /// Pair `(A_i, A_j)` with `A_i ⊆ A`, `A_j ⊆ B`.
    Cross { i: usize, j: usize },
    /// Pair inside one side.
    Within { i: usize, j: usize },
}

impl StepBranch {
    pub fn label(self) -> String {
        match self {
            StepBranch::Cross { i, j } => format!("cross({i},{j})"),
            StepBranch::Within { i, j } => format!("within({i},{j})"),
        }
    }
}

#[derive(Clone, Debug)]
pub enum StepOutcome<T> {
    AmplifiedWitness {
        next: IncrementState<T>,
        branch: StepBranch,
        /// `(1+β)α`, which `next.alpha` reaches.
        required_alpha: T,
        unmet: Vec<Precondition<T>>,
    },
    PreconditionUnmet(Vec<Precondition<T>>),
    NoWitnessFound {
        exhaustive: bool,
        unmet: Vec<Precondition<T>>,
    },
}

#[derive(Clone, Copy, Debug)]
pub struct StepConfig {
    pub strategy: Strategy,
    /// Seeds the equitable partition.
    pub seed: Seed,
    /// Stop with [`StepOutcome::PreconditionUnmet`] instead of searching when
    /// the lemma's hypotheses fail. When off, the search still runs and every
    /// amplified witness is still checked exactly.
    pub enforce_preconditions: bool,
}

fn equitable(s: &VertexSet, k: usize, rng: &mut impl Rng) -> Vec<VertexSet> {
    let mut vs = s.to_vec();
    vs.shuffle(rng);
    let mut parts = vec![VertexSet::empty(s.universe()); k];
    for (i, v) in vs.into_iter().enumerate() {
        parts[i % k].insert(v);
    }
    parts
}

pub fn density_increment_step<T: Scalar>(
    g: &Graph,
    h: &Pattern,
    state: &IncrementState<T>,
    delta_q: &T,
    cfg: &StepConfig,
) -> Result<StepOutcome<T>> {
    check_pattern(h)?;
    let (a, b) = (&state.a, &state.b);
    let p = state.params.p.clone();
    let cur = IncrementState::at(
        g,
        h,
        &p,
        a.clone(),
        b.clone(),
        state.iteration,
        state.beta.clone(),
    )?;
    let (alpha, d, params) = (cur.alpha.clone(), cur.density.clone(), cur.params.clone());
    let r = h.r();

    let mut unmet = Vec::new();
    let alpha_limit = params.alpha_limit();
    if alpha.is_zero() || alpha > alpha_limit {
        unmet.push(Precondition::Alpha {
            alpha: alpha.clone(),
            limit: alpha_limit,
        });
    }
    let delta_limit = params.delta_limit(&alpha, a.len(), g.n());
    if *delta_q > delta_limit {
        unmet.push(Precondition::Delta {
            delta: delta_q.clone(),
            limit: delta_limit,
        });
    }
    if alpha.is_zero() || (cfg.enforce_preconditions && !unmet.is_empty()) {
        return Ok(StepOutcome::PreconditionUnmet(unmet));
    }

    let (k1, k2) = (r / 2, r - r / 2);
    if a.len() < k2 {
        return Err(Error::Precondition(format!(
            "|A| = {} too small to split into {k2} parts",
            a.len()
        )));
    }
    let mut rng = cfg.seed.rng();
    let mut parts = equitable(a, k1, &mut rng);
    parts.extend(equitable(b, k2, &mut rng));

    let above = cur.above();
    let dir = if above {
        Direction::Lower
    } else {
        Direction::Upper
    };
    let upsilon = params.upsilon.clone();
    let area = T::of_usize(a.len()) * T::of_usize(b.len());
    let mut exhaustive = true;

    let amplified =
        |w: &RegularityWitness<T>, branch: StepBranch| -> Result<Option<StepOutcome<T>>> {
            let a2 = w.a_prime.clone();
            let b2 = w.b_prime.clone();
            if a2.is_empty() || a2.len() != b2.len() {
                return Ok(None);
            }
            let beta = params.gamma.clone() * T::of_usize(a.len()) / T::of_usize(a2.len());
            let required = (T::one() + beta.clone()) * alpha.clone();
            let next = IncrementState::at(g, h, &p, a2, b2, state.iteration + 1, Some(beta))?;
            if next.alpha < required {
                return Ok(None);
            }
            Ok(Some(StepOutcome::AmplifiedWitness {
                next,
                branch,
                required_alpha: required,
                unmet: unmet.clone(),
            }))
        };

    for i in 0..k1 {
        for j in k1..r {
            let s = find_irregularity_witness(
                g,
                &parts[i],
                &parts[j],
                &d,
                &upsilon,
                dir,
                cfg.strategy,
            )?;
            exhaustive &= s.exhaustive;
            let Some(w) = s.witness else { continue };
            // The same subpair, measured against the host pair.
            let lift = upsilon.clone() * T::of_usize(parts[i].len()) * T::of_usize(parts[j].len())
                / area.clone();
            let lifted =
                RegularityWitness::new(g, w.a_prime, w.b_prime, dir, (a, b), d.clone(), lift);
            let converted = convert_witness(g, &lifted)?;
            let eq = equalize_witness(g, &converted)?;
            if let Some(out) = amplified(&eq.witness, StepBranch::Cross { i, j })? {
                return Ok(out);
            }
        }
    }
    let q = if above {
        (T::one() - alpha.clone()) * p.clone()
    } else {
        (T::one() + alpha.clone()) * p.clone()
    };
    for (lo, hi) in [(0, k1), (k1, r)] {
        for i in lo..hi {
            for j in i + 1..hi {
                let s = find_irregularity_witness(
                    g,
                    &parts[i],
                    &parts[j],
                    &q,
                    &upsilon,
                    dir,
                    cfg.strategy,
                )?;
                exhaustive &= s.exhaustive;
                let Some(w) = s.witness else { continue };
                let eq = equalize_witness(g, &w)?;
                if let Some(out) = amplified(&eq.witness, StepBranch::Within { i, j })? {
                    return Ok(out);
                }
            }
        }
    }
    Ok(StepOutcome::NoWitnessFound { exhaustive, unmet })
}

#[derive(Clone, Debug)]
pub struct DriverConfig<T> {
    pub max_iters: usize,
    /// Measured `Q` defect fed to the step preconditions.
    pub delta_q: T,
    pub seed: Seed,
    pub strategy: Strategy,
    pub enforce_preconditions: bool,
    /// Extra lower bound on `|A|`, on top of the measured floor.
    pub min_size: usize,
}

impl<T: Scalar> DriverConfig<T> {
    pub fn new(seed: Seed) -> Self {
        DriverConfig {
            max_iters: 50,
            delta_q: T::zero(),
            seed,
            strategy: Strategy::Auto { seed },
            enforce_preconditions: false,
            min_size: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceRecord {
    pub iter: usize,
    pub size: usize,
    pub alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_exact: Option<String>,
    pub beta: Option<f64>,
    pub branch: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub unmet: Vec<&'static str>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "exit", rename_all = "snake_case")]
pub enum DriverExit {
    AlphaThreshold,
    NoWitnessFound { exhaustive: bool },
    SizeFloor,
    MaxIters,
    PreconditionUnmet,
}

/// Measurements from the final pair once `α > 1/(16mr)`.
#[derive(Clone, Debug, Serialize)]
pub struct Endgame {
    pub above: bool,
    pub c: usize,
    pub c1: usize,
    pub c1_density: f64,
    pub c1_level: f64,
    pub c1_certified: bool,
    /// `d(C1) ≥ p - κ` (or `≤ p + κ` below).
    pub kappa_ok: bool,
    pub d: usize,
    pub d1: usize,
    /// `α p^{m-1} |C1| / (40r)` before rounding up.
    pub d1_target: f64,
    pub count: u128,
    pub expected: f64,
    /// `(count - p^m |C1 ∪ D1|^r) / n^r`.
    pub excess: f64,
    pub eta: f64,
    pub kappa: f64,
}

#[derive(Clone, Debug)]
pub struct DriverTrace<T> {
    pub states: Vec<IncrementState<T>>,
    pub records: Vec<TraceRecord>,
    pub exit: DriverExit,
    pub size_floor: usize,
    pub endgame: Option<Endgame>,
}

impl<T: Scalar> DriverTrace<T> {
    /// `α` never decreases along the trace (decided in `T`).
    pub fn is_monotone(&self) -> bool {
        self.states.windows(2).all(|w| w[1].alpha >= w[0].alpha)
    }

    pub fn final_state(&self) -> &IncrementState<T> {
        self.states
            .last()
            .expect("trace starts with the initial state")
    }

    /// One JSON object per recorded iteration.
    pub fn to_jsonl(&self) -> String {
        self.records
            .iter()
            .map(|r| serde_json::to_string(r).expect("record serialises") + "\n")
            .collect()
    }
}

fn record<T: Scalar>(
    s: &IncrementState<T>,
    branch: String,
    unmet: &[Precondition<T>],
) -> TraceRecord {
    TraceRecord {
        iter: s.iteration,
        size: s.a.len(),
        alpha: s.alpha.as_f64(),
        alpha_exact: T::EXACT.then(|| s.alpha.to_exact().to_string()),
        beta: s.beta.as_ref().map(|b| b.as_f64()),
        branch,
        unmet: unmet.iter().map(|u| u.label()).collect(),
    }
}

/// `½ ε^{1/2 + 2/(eγ)} n` with `ε = α₀ p`, at least `max(r, 4, min_size)`.
fn size_floor(n: usize, alpha0: f64, p: f64, gamma: f64, r: usize, min_size: usize) -> usize {
    let eps = (alpha0 * p).min(1.0);
    let expo = 0.5 + 2.0 / (std::f64::consts::E * gamma);
    let measured = (0.5 * eps.powf(expo) * n as f64).ceil();
    let measured = if measured.is_finite() {
        measured as usize
    } else {
        0
    };
    measured.max(r).max(4).max(min_size)
}

/// Repeats [`density_increment_step`] from `(A0, B0)`, keeping each amplified
/// pair, and runs the endgame when the final `α` exceeds `1/(16mr)`.
pub fn increment_driver<T: Scalar>(
    g: &Graph,
    h: &Pattern,
    p: &T,
    a0: &VertexSet,
    b0: &VertexSet,
    cfg: &DriverConfig<T>,
) -> Result<DriverTrace<T>> {
    let init = IncrementState::initial(g, h, p, a0.clone(), b0.clone())?;
    if init.alpha.is_zero() {
        return Err(Error::Precondition(
            "initial pair has density exactly p".into(),
        ));
    }
    let floor = size_floor(
        g.n(),
        init.alpha.as_f64(),
        p.as_f64(),
        init.params.gamma.as_f64(),
        h.r(),
        cfg.min_size,
    );
    let mut records = vec![record(&init, "initial".into(), &[])];
    let mut states = vec![init];
    let mut exit = DriverExit::MaxIters;
    for iter in 0..cfg.max_iters {
        let st = states.last().expect("nonempty");
        if cfg.enforce_preconditions && st.alpha > st.params.alpha_limit() {
            exit = DriverExit::AlphaThreshold;
            break;
        }
        if st.a.len() < floor {
            exit = DriverExit::SizeFloor;
            break;
        }
        let step_cfg = StepConfig {
            strategy: cfg.strategy,
            seed: Seed(cfg.seed.stream(iter as u64).gen()),
            enforce_preconditions: cfg.enforce_preconditions,
        };
        match density_increment_step(g, h, st, &cfg.delta_q, &step_cfg)? {
            StepOutcome::AmplifiedWitness {
                next,
                branch,
                unmet,
                ..
            } => {
                records.push(record(&next, branch.label(), &unmet));
                states.push(next);
            }
            StepOutcome::PreconditionUnmet(unmet) => {
                let a = unmet
                    .iter()
                    .any(|u| matches!(u, Precondition::Alpha { .. }));
                exit = if a && st.alpha > st.params.alpha_limit() {
                    DriverExit::AlphaThreshold
                } else {
                    DriverExit::PreconditionUnmet
                };
                break;
            }
            StepOutcome::NoWitnessFound { exhaustive, .. } => {
                exit = DriverExit::NoWitnessFound { exhaustive };
                break;
            }
        }
    }
    let last = states.last().expect("nonempty");
    let endgame = if last.alpha > last.params.alpha_limit() {
        Some(endgame(g, h, last, Seed(cfg.seed.stream(u64::MAX).gen()))?)
    } else {
        None
    };
    Ok(DriverTrace {
        states,
        records,
        exit,
        size_floor: floor,
        endgame,
    })
}

fn endgame<T: Scalar>(
    g: &Graph,
    h: &Pattern,
    st: &IncrementState<T>,
    seed: Seed,
) -> Result<Endgame> {
    let (m, r) = (h.m(), h.r());
    let p = st.params.p.as_f64();
    let alpha = st.alpha.as_f64();
    let above = st.above();
    let s = if above { 1.0 } else { -1.0 };
    let n = g.n();
    let pick = |from: &VertexSet, into: &VertexSet, frac: f64| {
        let thr = (1.0 + s * frac) * p * into.len() as f64;
        VertexSet::from_indices(
            n,
            from.iter()
                .filter(|&v| s * (into.count_in(g.row(v)) as f64 - thr) >= 0.0),
        )
    };
    let c = pick(&st.a, &st.b, alpha / 2.0);
    let eta = 1e-5 * alpha * alpha * p.powi(2 * m as i32) / (m * m) as f64;
    let kappa = 2.0 * m as f64 * eta * p.powi(1 - m as i32);
    let (c1, c1_level, c1_certified) = if c.len() >= 4 {
        let rs = find_regular_subset(g, &c, eta, seed)?;
        (rs.set, rs.level, rs.certified)
    } else {
        (c.clone(), f64::NAN, false)
    };
    let k = c1.len();
    let c1_density = if k < 2 {
        0.0
    } else {
        g.edges_within(&c1) as f64 / (k * (k - 1) / 2) as f64
    };
    let kappa_ok = if above {
        c1_density >= p - kappa
    } else {
        c1_density <= p + kappa
    };
    let d = pick(&st.b, &c1, alpha / 4.0);
    let d1_target = alpha * p.powi(m as i32 - 1) / (40.0 * r as f64) * k as f64;
    let mut ranked: Vec<(usize, usize)> = d.iter().map(|v| (c1.count_in(g.row(v)), v)).collect();
    if above {
        ranked.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
    } else {
        ranked.sort();
    }
    let d1_len = (d1_target.ceil() as usize).min(ranked.len());
    let d1 = VertexSet::from_indices(n, ranked[..d1_len].iter().map(|&(_, v)| v));
    let u = c1.union(&d1);
    let count = count_labeled_copies(h, g, &u)?;
    let expected = p.powi(m as i32) * (u.len() as f64).powi(r as i32);
    let excess = (count as f64 - expected) / (n as f64).powi(r as i32);
    Ok(Endgame {
        above,
        c: c.len(),
        c1: k,
        c1_density,
        c1_level,
        c1_certified,
        kappa_ok,
        d: d.len(),
        d1: d1_len,
        d1_target,
        count,
        expected,
        excess,
        eta,
        kappa,
    })
}

/// `c' ε^{c}` with `c = 10 r⁴ p^{1-m}`, the hereditary tolerance that the
/// theorem pairs with edge tolerance `ε`. `c'` is unspecified by the proof.
pub fn theorem_delta(p: f64, r: usize, m: usize, eps: f64, c_prime: f64) -> f64 {
    let c = 10.0 * (r as f64).powi(4) * p.powi(1 - m as i32);
    c_prime * eps.powf(c)
}

/// `log10` of [`theorem_delta`], which underflows `f64` for most inputs.
pub fn theorem_delta_log10(p: f64, r: usize, m: usize, eps: f64, c_prime: f64) -> f64 {
    let c = 10.0 * (r as f64).powi(4) * p.powi(1 - m as i32);
    c_prime.log10() + c * eps.log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{expand_template, gen_gnp};
    use crate::scalar::{parse_scalar, Rational};
    use crate::template::WeightedTemplate;

    fn rat(s: &str) -> Rational {
        parse_scalar(s).unwrap()
    }

    #[test]
    fn params_follow_formulas() {
        let h = Pattern::complete(3);
        let pp = IncrementParams::new(&h, &rat("1/2"), &rat("1/10"));
        assert_eq!(pp.gamma, rat("1/432"));
        assert_eq!(pp.upsilon, rat("1/960"));
        assert_eq!(pp.alpha_limit(), rat("1/144"));
        assert_eq!(pp.eta, rat("1") / rat("5760000000"));
        assert_eq!(pp.kappa, pp.eta.clone() * rat("24"));
    }

    #[test]
    fn alpha_guard_and_size_check() {
        let planted =
            expand_template(&WeightedTemplate::two_block(0.5, 0.1, 40).unwrap(), Seed(1)).unwrap();
        let g = &planted.graph;
        let (a, b) = (planted.layout.block(0, 80), planted.layout.block(1, 80));
        let h = Pattern::complete(3);
        let st = IncrementState::initial(g, &h, &rat("1/2"), a.clone(), b).unwrap();
        let cfg = StepConfig {
            strategy: Strategy::Auto { seed: Seed(1) },
            seed: Seed(2),
            enforce_preconditions: true,
        };
        match density_increment_step(g, &h, &st, &rat("0"), &cfg).unwrap() {
            StepOutcome::PreconditionUnmet(u) => assert_eq!(u[0].label(), "alpha"),
            o => panic!("{o:?}"),
        }
        let short = VertexSet::from_range(80, 40..75);
        assert!(IncrementState::initial(g, &h, &rat("1/2"), a, short).is_err());
    }

    #[test]
    fn planted_steps_amplify_exactly() {
        let planted = expand_template(
            &WeightedTemplate::two_block(0.5, 0.1, 100).unwrap(),
            Seed(3),
        )
        .unwrap();
        let g = &planted.graph;
        let (a, b) = (planted.layout.block(0, 200), planted.layout.block(1, 200));
        let h = Pattern::complete(3);
        let mut cfg = DriverConfig::<Rational>::new(Seed(4));
        cfg.max_iters = 6;
        let trace = increment_driver(g, &h, &rat("1/2"), &a, &b, &cfg).unwrap();
        assert!(trace.states.len() >= 2, "{:?}", trace.exit);
        assert!(trace.is_monotone());
        for w in trace.states.windows(2) {
            let beta = w[1].params.gamma.clone() * rat(&w[0].a.len().to_string())
                / rat(&w[1].a.len().to_string());
            assert_eq!(w[1].beta.as_ref(), Some(&beta));
            assert!(w[1].alpha >= (rat("1") + beta) * w[0].alpha.clone());
            assert!(w[1].a.is_disjoint(&w[1].b));
        }
        assert_eq!(trace.to_jsonl().lines().count(), trace.states.len());
        if trace.final_state().alpha > trace.final_state().params.alpha_limit() {
            assert!(trace.endgame.is_some());
        }
    }

    #[test]
    fn regular_pair_reports_no_witness() {
        let g = Graph::complete_bipartite(30, 30);
        let a = VertexSet::from_range(60, 0..30);
        let b = VertexSet::from_range(60, 30..60);
        let h = Pattern::complete(2);
        let p = rat("100/101");
        let mut cfg = DriverConfig::<Rational>::new(Seed(1));
        cfg.enforce_preconditions = true;
        let trace = increment_driver(&g, &h, &p, &a, &b, &cfg).unwrap();
        assert_eq!(trace.exit, DriverExit::NoWitnessFound { exhaustive: false });
        assert_eq!(trace.states.len(), 1);
        assert!(trace.endgame.is_none());
    }

    #[test]
    fn random_split_trace_is_monotone() {
        let g = gen_gnp(120, 0.5, Seed(5)).unwrap();
        let a = VertexSet::from_range(120, 0..60);
        let b = VertexSet::from_range(120, 60..120);
        let h = Pattern::complete(2);
        let p = pair_density::<f64>(&g, &a, &b) * 1.004;
        let mut cfg = DriverConfig::<f64>::new(Seed(1));
        cfg.max_iters = 10;
        cfg.enforce_preconditions = true;
        let trace = increment_driver(&g, &h, &p, &a, &b, &cfg).unwrap();
        assert!(trace.is_monotone());
        if trace.exit == DriverExit::AlphaThreshold {
            assert!(trace.endgame.is_some());
        }
    }

    #[test]
    fn theorem_delta_is_tiny() {
        assert!(theorem_delta(0.5, 3, 3, 0.1, 1.0) < 1e-100);
        assert_eq!(theorem_delta(0.5, 2, 1, 1.0, 0.25), 0.25);
        assert_eq!(theorem_delta_log10(0.5, 3, 3, 0.1, 1.0), -3240.0);
        let direct = theorem_delta(1.0, 1, 1, 0.5, 2.0).log10();
        assert!((theorem_delta_log10(1.0, 1, 1, 0.5, 2.0) - direct).abs() < 1e-12);
    }
}
