//! Exact group-ring and lattice computations for modules of elliptic-unit relations.
//!
//! The crate models the Galois frame of a ramification instance, builds the
//! relation module `U` as a concrete integer lattice with group action, extracts
//! roots of target vectors, and checks index and annihilator statements exactly.

pub mod annihilator;
pub mod cli;
pub mod error;
pub mod frame;
pub mod group_ring;
pub mod lattice;
pub mod module;
pub mod report;
pub mod selftest;

pub use error::{Error, Result};
