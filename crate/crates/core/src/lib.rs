//! Packings of edge-disjoint transitive subtournaments.

pub mod bitset;
pub mod bounds;
pub mod cli;
pub mod cache;
pub mod constructions;
pub mod designs;
pub mod enumeration;
pub mod packing;
pub mod report;
pub mod error;
pub mod experiments;
pub mod rng;
pub mod tournament;

pub use error::{Error, Result};
pub use tournament::{transitive_lower_bound, ScoreSequence, Tournament, TriangleCensus};

/// Exact rational used for expectations and bounds.
pub type Rational = num_rational::Ratio<i64>;
