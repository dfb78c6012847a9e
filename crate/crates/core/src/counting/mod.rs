//! Exact subgraph counting.
//!
//! A labelled copy of `H` is an injective edge-preserving map `V(H) → V(G)`, so
//! `K_r` in `K_n` gives the falling factorial `n (n-1) ... (n-r+1)`. All counts
//! are accumulated in `u128`; inputs that could exceed it are rejected.

pub mod bounds;
pub mod cliques;
mod copies;
mod matcher;
pub mod vandermonde;

pub use bounds::{generalized_binomial, kk_bound_holds, kk_clique_upper_bound, power_sum_gap};
pub use cliques::{
    count_cliques, count_cross_cliques, degree_power_discrepancy, pair_clique_count,
    vertex_clique_profile, ClassCountVector, DiscrepancyProfile,
};
pub use copies::{
    check_capacity, count_copies_through, count_homomorphisms, count_labeled_copies, count_partite,
    count_unlabeled_copies, partite_count_via_inclusion_exclusion, PartiteMode,
};
pub use vandermonde::{vandermonde_recover, Recovery};

pub(crate) use copies::ordered_partite_unchecked;
pub(crate) use matcher::placement_order;
