//! Defects of a graph with respect to the count properties.
//!
//! Every defect is a maximum normalised deviation `|count - expected| / n^r`,
//! with `r` the pattern order. Counts are labelled copies, so the edge
//! property compares `2 e(S)` against `p |S|^2`.
//!
//! Searches rank witnesses in `f64`; the reported value is recomputed in `T`
//! from the integer count, so with `T = Rational` it is exact and a report can
//! be re-verified bit for bit from its witness.

mod hereditary;
mod mask;
mod partite;
mod transfer;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::counting::{count_labeled_copies, count_partite, PartiteMode};
use crate::error::Result;
use crate::generate::Seed;
use crate::graph::Graph;
use crate::pattern::{factorial, Pattern};
use crate::scalar::Scalar;
use crate::vertex_set::VertexSet;

pub use hereditary::{defect_global, defect_hereditary};
pub use partite::{defect_ordered_partite, defect_partite};
pub use transfer::{
    counting_transfer_check, egps_halve, split_deviation_experiment, EgpsResult, SplitOutcome,
    TransferCheck,
};

/// Exact hereditary enumeration limit.
pub const EXACT_MAX_N: usize = 24;
/// Exact hereditary limit for patterns on four or more vertices.
pub const EXACT_MAX_N_LARGE_PATTERN: usize = 18;
/// Exact partite enumeration limits.
pub const EXACT_PARTITE_MAX_N: usize = 16;
pub const EXACT_PARTITE_MAX_R: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Family {
    #[serde(rename = "P")]
    Global,
    #[serde(rename = "Pstar")]
    Hereditary,
    #[serde(rename = "Q")]
    Partite,
    #[serde(rename = "R")]
    OrderedPartite,
}

impl Family {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "P" | "global" => Some(Family::Global),
            "Pstar" | "P*" | "hereditary" => Some(Family::Hereditary),
            "Q" | "partite" => Some(Family::Partite),
            "R" | "ordered" => Some(Family::OrderedPartite),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Family::Global => "P",
            Family::Hereditary => "Pstar",
            Family::Partite => "Q",
            Family::OrderedPartite => "R",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropertyKind<T> {
    pub family: Family,
    pub pattern: Pattern,
    pub p: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    /// Sample 0 is the full vertex set (or a round-robin partition); sample
    /// `i ≥ 1` draws from ChaCha stream `i` of `seed`, so a run with more
    /// samples examines a superset of the witnesses of a shorter run.
    Sampled {
        samples: usize,
        seed: Seed,
        local_search: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Set(VertexSet),
    Parts {
        parts: Vec<VertexSet>,
        permutation: Option<Vec<usize>>,
    },
}

#[derive(Clone, Debug)]
pub struct DefectReport<T> {
    pub kind: PropertyKind<T>,
    pub n: usize,
    pub defect: T,
    pub count: u128,
    pub expected: T,
    pub witness: Witness,
    pub mode: Mode,
}

/// `p^m · scale · size^r` for pattern order `r` and `m` edges.
pub(crate) fn expected_count<T: Scalar>(p: &T, h: &Pattern, scale: u128, size_pow: u128) -> T {
    p.powu(h.m() as u32) * T::from_count(scale) * T::from_count(size_pow)
}

pub(crate) fn normalized<T: Scalar>(count: u128, expected: &T, n: usize, r: usize) -> T {
    (T::from_count(count) - expected.clone()).abs() / T::of_usize(n).powu(r as u32)
}

impl<T: Scalar> DefectReport<T> {
    pub(crate) fn for_set(
        kind: PropertyKind<T>,
        g: &Graph,
        s: VertexSet,
        count: u128,
        mode: Mode,
    ) -> Self {
        let r = kind.pattern.r();
        let expected = expected_count(&kind.p, &kind.pattern, 1, (s.len() as u128).pow(r as u32));
        let defect = normalized(count, &expected, g.n(), r);
        DefectReport {
            kind,
            n: g.n(),
            defect,
            count,
            expected,
            witness: Witness::Set(s),
            mode,
        }
    }

    pub(crate) fn for_parts(
        kind: PropertyKind<T>,
        g: &Graph,
        parts: Vec<VertexSet>,
        permutation: Option<Vec<usize>>,
        count: u128,
        mode: Mode,
    ) -> Self {
        let r = kind.pattern.r();
        let prod: u128 = parts.iter().map(|p| p.len() as u128).product();
        let scale = if kind.family == Family::Partite {
            factorial(r)
        } else {
            1
        };
        let expected = expected_count(&kind.p, &kind.pattern, scale, prod);
        let defect = normalized(count, &expected, g.n(), r);
        DefectReport {
            kind,
            n: g.n(),
            defect,
            count,
            expected,
            witness: Witness::Parts { parts, permutation },
            mode,
        }
    }

    /// Recounts on the stored witness and checks the reported defect.
    pub fn verify(&self, g: &Graph) -> Result<bool> {
        let h = &self.kind.pattern;
        let count = match &self.witness {
            Witness::Set(s) => count_labeled_copies(h, g, s)?,
            Witness::Parts { parts, permutation } => match (self.kind.family, permutation) {
                (Family::OrderedPartite, Some(pi)) => {
                    count_partite(h, g, parts, &PartiteMode::Ordered(pi.clone()))?
                }
                _ => count_partite(h, g, parts, &PartiteMode::Averaged)?,
            },
        };
        let again = match &self.witness {
            Witness::Set(s) => Self::for_set(self.kind.clone(), g, s.clone(), count, self.mode),
            Witness::Parts { parts, permutation } => Self::for_parts(
                self.kind.clone(),
                g,
                parts.clone(),
                permutation.clone(),
                count,
                self.mode,
            ),
        };
        Ok(count == self.count && again.defect == self.defect)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serialises")
    }
}

impl<T: Scalar> Serialize for DefectReport<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("kind", &self.kind.family)?;
        m.serialize_entry("pattern", self.kind.pattern.name())?;
        m.serialize_entry("p", &self.kind.p.as_f64())?;
        m.serialize_entry("n", &self.n)?;
        m.serialize_entry("defect", &self.defect.as_f64())?;
        if T::EXACT {
            m.serialize_entry("defect_exact", &self.defect.to_exact().to_string())?;
        }
        m.serialize_entry("count", &self.count.to_string())?;
        m.serialize_entry("expected", &self.expected.as_f64())?;
        match &self.witness {
            Witness::Set(set) => m.serialize_entry("witness", &set.to_vec())?,
            Witness::Parts { parts, permutation } => {
                let lists: Vec<Vec<usize>> = parts.iter().map(|p| p.to_vec()).collect();
                m.serialize_entry("witness", &lists)?;
                if let Some(pi) = permutation {
                    m.serialize_entry("permutation", pi)?;
                }
            }
        }
        match self.mode {
            Mode::Exact => m.serialize_entry("mode", "exact")?,
            Mode::Sampled {
                samples,
                seed,
                local_search,
            } => {
                m.serialize_entry("mode", "sampled")?;
                m.serialize_entry("samples", &samples)?;
                m.serialize_entry("seed", &seed.0)?;
                m.serialize_entry(
                    "streams",
                    "sample i uses chacha8 stream i; sample 0 is deterministic",
                )?;
                m.serialize_entry("local_search", &local_search)?;
            }
        }
        m.end()
    }
}

const NEAR: f64 = 1e-9;
const KEEP: usize = 32;

/// Running maximum that keeps every witness within a relative `1e-9` of the
/// best `f64` score, so the final choice can be made in exact arithmetic.
#[derive(Clone, Debug)]
pub(crate) struct Scored<W> {
    items: Vec<(f64, W)>,
    best: f64,
}

impl<W: Ord + Clone> Scored<W> {
    pub fn new() -> Self {
        Scored {
            items: Vec::new(),
            best: f64::NEG_INFINITY,
        }
    }

    pub fn offer(&mut self, score: f64, w: impl FnOnce() -> W) {
        if score < self.best - NEAR * self.best.abs() - 1e-300 {
            return;
        }
        self.best = self.best.max(score);
        self.items.push((score, w()));
        if self.items.len() > 4 * KEEP {
            self.prune();
        }
    }

    pub fn merge(mut self, other: Self) -> Self {
        self.best = self.best.max(other.best);
        self.items.extend(other.items);
        self.prune();
        self
    }

    fn prune(&mut self) {
        let floor = self.best - NEAR * self.best.abs() - 1e-300;
        self.items.retain(|(s, _)| *s >= floor);
        self.items.sort_by(|a, b| a.1.cmp(&b.1));
        self.items.dedup_by(|a, b| a.1 == b.1);
        self.items.truncate(KEEP);
    }

    pub fn into_candidates(mut self) -> Vec<W> {
        self.prune();
        self.items.into_iter().map(|(_, w)| w).collect()
    }
}

/// Picks the report with the largest exact defect; ties go to the smallest
/// witness in candidate order.
pub(crate) fn pick_max<T: Scalar>(reports: Vec<DefectReport<T>>) -> DefectReport<T> {
    let mut it = reports.into_iter();
    let mut best = it.next().expect("at least one candidate");
    for r in it {
        if r.defect > best.defect {
            best = r;
        }
    }
    best
}
