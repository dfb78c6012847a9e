//! Lower and upper regularity of vertex-set pairs, and the density-increment
//! machinery built on them.
//!
//! `(A, B)` is lower-`(q, ε)`-regular when `e(A', B') ≥ q|A'||B'| - ε|A||B|`
//! for all `A' ⊆ A`, `B' ⊆ B`; upper-regular is the mirror image. Thresholds
//! are generic over [`Scalar`]; with `Rational` every violation and every
//! lemma inequality is decided without rounding.

mod increment;
mod search;
mod single;
mod transform;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::generate::Seed;
use crate::graph::Graph;
use crate::scalar::Scalar;
use crate::vertex_set::VertexSet;

pub use increment::{
    density_increment_step, increment_driver, theorem_delta, theorem_delta_log10, DriverConfig,
    DriverExit, DriverTrace, Endgame, IncrementParams, IncrementState, Precondition, StepBranch,
    StepConfig, StepOutcome, TraceRecord,
};
pub use single::{find_regular_subset, single_set_deviation, RegularSubset, EXACT_SINGLE_MAX};
pub use transform::{
    check_counting_lemma, convert_witness, counting_lower_bound, equalize_witness,
    CountingLemmaCheck, Equalized,
};

use search::Objective;

/// Exact pair search limit on `|A| + |B|`.
pub const EXACT_PAIR_MAX: usize = 24;
/// Random restarts of the hill climb, besides the degree-split start.
pub const RESTARTS: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Lower,
    Upper,
}

impl Direction {
    pub fn opposite(self) -> Self {
        match self {
            Direction::Lower => Direction::Upper,
            Direction::Upper => Direction::Lower,
        }
    }

    pub(crate) fn sign(self) -> i8 {
        match self {
            Direction::Lower => -1,
            Direction::Upper => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Exhaustive; needs `|A| + |B| ≤ 24`. A negative answer proves regularity.
    Exact,
    /// Degree-split start plus `restarts` seeded random starts.
    HillClimb { restarts: usize, seed: Seed },
    /// Degree-split start only.
    DegreeSplit,
    /// Exact when it fits, otherwise hill climbing with [`RESTARTS`].
    Auto { seed: Seed },
}

/// Subpair `(A', B')` of the host pair `(A, B)` together with the `(q, ε)` it
/// is tested against.
#[derive(Clone, Debug, PartialEq)]
pub struct RegularityWitness<T> {
    pub a_prime: VertexSet,
    pub b_prime: VertexSet,
    pub edges: usize,
    pub direction: Direction,
    pub host_a: VertexSet,
    pub host_b: VertexSet,
    pub q: T,
    pub eps: T,
}

/// `e(A, B) / (|A||B|)`, zero for an empty side.
pub fn pair_density<T: Scalar>(g: &Graph, a: &VertexSet, b: &VertexSet) -> T {
    if a.is_empty() || b.is_empty() {
        return T::zero();
    }
    T::from_count(g.edges_between(a, b) as u128) / (T::of_usize(a.len()) * T::of_usize(b.len()))
}

impl<T: Scalar> RegularityWitness<T> {
    pub(crate) fn new(
        g: &Graph,
        a_prime: VertexSet,
        b_prime: VertexSet,
        direction: Direction,
        host: (&VertexSet, &VertexSet),
        q: T,
        eps: T,
    ) -> Self {
        let edges = g.edges_between(&a_prime, &b_prime);
        RegularityWitness {
            a_prime,
            b_prime,
            edges,
            direction,
            host_a: host.0.clone(),
            host_b: host.1.clone(),
            q,
            eps,
        }
    }

    pub fn density(&self) -> T {
        let ab = self.a_prime.len() * self.b_prime.len();
        if ab == 0 {
            return T::zero();
        }
        T::from_count(self.edges as u128) / T::of_usize(ab)
    }

    /// `e(A', B') - q |A'||B'|`.
    pub fn deviation(&self) -> T {
        T::of_usize(self.edges)
            - self.q.clone() * T::of_usize(self.a_prime.len()) * T::of_usize(self.b_prime.len())
    }

    fn host_area(&self) -> T {
        T::of_usize(self.host_a.len()) * T::of_usize(self.host_b.len())
    }

    /// The pair breaks `(q, ε)`-regularity in its direction (strictly).
    pub fn violates(&self) -> bool {
        let slack = self.eps.clone() * self.host_area();
        match self.direction {
            Direction::Lower => self.deviation() < -slack,
            Direction::Upper => self.deviation() > slack,
        }
    }

    /// Recounts the edges and checks containment in the host pair.
    pub fn recheck(&self, g: &Graph) -> bool {
        self.a_prime.is_subset(&self.host_a)
            && self.b_prime.is_subset(&self.host_b)
            && g.edges_between(&self.a_prime, &self.b_prime) == self.edges
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "a_prime": self.a_prime.to_vec(),
            "b_prime": self.b_prime.to_vec(),
            "edges": self.edges,
            "density": self.density().as_f64(),
            "direction": self.direction,
            "q": self.q.as_f64(),
            "eps": self.eps.as_f64(),
            "host_sizes": [self.host_a.len(), self.host_b.len()],
        })
    }
}

#[derive(Clone, Debug)]
pub struct WitnessSearch<T> {
    pub witness: Option<RegularityWitness<T>>,
    /// The whole subpair space was examined, so a missing witness proves the
    /// pair regular.
    pub exhaustive: bool,
}

impl<T> WitnessSearch<T> {
    pub fn certified_regular(&self) -> bool {
        self.witness.is_none() && self.exhaustive
    }
}

pub(crate) fn check_pair(a: &VertexSet, b: &VertexSet) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("regularity pair needs two nonempty sets"));
    }
    if !a.is_disjoint(b) {
        return Err(Error::invalid("regularity pair sets overlap"));
    }
    Ok(())
}

/// Subpair maximising the violation in `direction`, with its exact value
/// `∓(e(A', B') - q|A'||B'|)` and whether the search was exhaustive.
fn most_violating<T: Scalar>(
    g: &Graph,
    a: &VertexSet,
    b: &VertexSet,
    q: &T,
    direction: Direction,
    strategy: Strategy,
) -> Result<(T, VertexSet, VertexSet, bool)> {
    check_pair(a, b)?;
    let fits = a.len() + b.len() <= EXACT_PAIR_MAX;
    let obj = Objective {
        g,
        x: a,
        y: b,
        q,
        sign: direction.sign(),
    };
    let (found, exhaustive) = match strategy {
        Strategy::Exact if !fits => {
            return Err(Error::ExactLimit(format!(
                "exact regularity search needs |A| + |B| <= {EXACT_PAIR_MAX}, got {}",
                a.len() + b.len()
            )))
        }
        Strategy::Exact => (obj.exhaustive(), true),
        Strategy::Auto { .. } if fits => (obj.exhaustive(), true),
        Strategy::Auto { seed } => (obj.heuristic(RESTARTS, seed), false),
        Strategy::HillClimb { restarts, seed } => (obj.heuristic(restarts, seed), false),
        Strategy::DegreeSplit => (obj.heuristic(0, Seed(0)), false),
    };
    Ok((found.value, found.a, found.b, exhaustive))
}

/// Searches for a subpair breaking lower- or upper-`(q, ε)`-regularity of `(A, B)`.
pub fn find_irregularity_witness<T: Scalar>(
    g: &Graph,
    a: &VertexSet,
    b: &VertexSet,
    q: &T,
    eps: &T,
    direction: Direction,
    strategy: Strategy,
) -> Result<WitnessSearch<T>> {
    if *eps < T::zero() {
        return Err(Error::invalid("regularity tolerance must be non-negative"));
    }
    let (_, ap, bp, exhaustive) = most_violating(g, a, b, q, direction, strategy)?;
    let w = RegularityWitness::new(g, ap, bp, direction, (a, b), q.clone(), eps.clone());
    Ok(WitnessSearch {
        witness: w.violates().then_some(w),
        exhaustive,
    })
}

/// Smallest `ε` for which `(A, B)` is `(q, ε)`-regular in `direction`, as
/// found by the strategy (exact with [`Strategy::Exact`], a lower bound otherwise).
pub fn regularity_level<T: Scalar>(
    g: &Graph,
    a: &VertexSet,
    b: &VertexSet,
    q: &T,
    direction: Direction,
    strategy: Strategy,
) -> Result<T> {
    let (v, _, _, _) = most_violating(g, a, b, q, direction, strategy)?;
    let area = T::of_usize(a.len()) * T::of_usize(b.len());
    Ok(v.max_of(T::zero()) / area)
}
