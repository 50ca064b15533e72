//! Construction and analysis of slim rectangular lattice diagrams.
//!
//! The crate builds slim rectangular lattices as exact-rational planar
//! diagrams via multifork insertion, extracts their neon tubes and lamps,
//! relates the lamp poset to the poset of join-irreducible congruences, and
//! runs forbidden-subposet and representability checks on candidate
//! congruence posets.

pub mod diagram;
pub mod docs;
pub mod forbidden;
pub mod geom;
pub mod lamps;
pub mod lattice;
pub mod order;
pub mod photon;
pub mod repr;
pub mod suite;
