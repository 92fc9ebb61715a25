//! Tsallis-q entanglement numerics for generalized W-class (GW) qudit states.
//!
//! The crate provides dense multi-qudit states ([`qstate`]), pure- and
//! mixed-state entanglement measures ([`measures`]), exact constructors for
//! GW / GWV / partially-coherent-superposition states ([`gwstates`]), a
//! brute-force convex-roof oracle ([`convexroof`]) and one checker per
//! monogamy or polygamy inequality ([`inequalities`]). The `gwmono` binary
//! wraps these in a CSV-emitting command line ([`cli`]).

pub mod cli;
pub mod convexroof;
pub mod error;
pub mod gwstates;
pub mod inequalities;
pub mod linalg;
pub mod measures;
pub mod qstate;
pub mod random;

pub use error::{Error, Result};
pub use qstate::{CoarseGrain, DensityMatrix, PartyPartition, PureState, SchmidtDecomposition};
