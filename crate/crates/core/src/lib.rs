//! Quasirandomness of graphs through hereditary subgraph counts.
//!
//! Counting is exact over `u128`. Numeric code is generic over [`Scalar`]
//! (`f64`, `f32` or the exact [`Rational`]); the aliases below fix the common
//! choices.

pub mod counting;
pub mod error;
pub mod generate;
pub mod graph;
pub mod io;
pub mod pattern;
pub mod properties;
pub mod regularity;
pub mod scalar;
pub mod template;
pub mod template_analysis;
pub mod vertex_set;

pub use error::{Error, ParseErrorKind, Result};
pub use generate::{Seed, PRNG_NAME};
pub use graph::{Graph, GraphBuilder};
pub use pattern::Pattern;
pub use scalar::{Rational, Scalar};
pub use template::WeightedTemplate;
pub use vertex_set::VertexSet;

pub type Template = WeightedTemplate<f64>;
pub type ExactTemplate = WeightedTemplate<Rational>;
pub type Profile = counting::DiscrepancyProfile<f64>;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
