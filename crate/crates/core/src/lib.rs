//! Finite structured spaces.
//!
//! A structured space is a finite topological space in which every point has a
//! fixed neighborhood carrying an algebraic structure. Structures are given as
//! (possibly partial) binary operation tables together with the list of laws
//! they are declared to satisfy, and every declared law is checked by an
//! encoding function that must vanish over the whole carrier.
//!
//! The crate is organised bottom-up:
//!
//! * [`topology`]: finite topologies, neighborhoods, Borel atoms, connectedness.
//! * [`algebra`]: operation tables, encoding functions, descriptors and morphisms.
//! * [`space`]: structured spaces, the structure map and validation.
//! * [`constructions`]: products, isomorphic replacement, quotients, direct limits.
//! * [`measure`]: atom measures and partition analyses.
//! * [`lattice`]: the neighborhood-membership map, its poset and lattice checks.
//! * [`format`]: JSON file schemas and machine-readable reports.

#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod constructions;
pub mod format;
pub mod lattice;
pub mod measure;
pub mod space;
pub mod topology;

mod verdict;

pub use verdict::Verdict;

#[cfg(test)]
pub(crate) mod fixtures;
