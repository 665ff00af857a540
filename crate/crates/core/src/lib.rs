//! Exact intersection calculus for snc divisors on rational surfaces.
//!
//! The crate is layered bottom-up: [`linalg`] (exact integer and rational
//! matrices, Smith normal form), [`graph`] (weighted dual graphs), [`divisor`]
//! (discriminants, chain invariants, barks), [`birational`] (blow-ups and fibers of
//! rulings), [`lattice`] (blow-ups of the projective plane as integer lattices),
//! [`coords`] (projective incidence over Q and Q(eps)) and [`verify`] (fixture-driven
//! scenario checks).

pub mod birational;
pub mod coords;
pub mod divisor;
pub mod error;
pub mod graph;
pub mod lattice;
pub mod linalg;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{Chain, DualGraph, QDivisor};
