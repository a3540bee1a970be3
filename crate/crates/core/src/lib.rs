//! Homological classification of symplectic configurations in
//! CP²#N(-CP²): enumeration of homological assignments, elimination by area
//! vectors, quadratic Cremona transforms and combinatorial types of the
//! blown-down arrangements.

// Dense matrix code reads better with explicit indices.
#![allow(clippy::needless_range_loop)]

pub mod arith;
pub mod lattice;
pub mod polyhedra;
pub mod configspec;
pub mod bounds;
pub mod enumerate;
pub mod eliminate;
pub mod nearness;
pub mod cremona;
pub mod scenarios;
