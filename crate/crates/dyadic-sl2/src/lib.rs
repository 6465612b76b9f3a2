//! Exact computations for the restriction of depth-zero supercuspidal
//! representations of SL(2) over dyadic fields to the maximal compact
//! subgroup: field arithmetic, square classes, finite congruence quotients,
//! character sums, a small Hecke algebra, nilpotent orbits and the resulting
//! branching tables.

pub mod branching;
pub mod cyclotomic;
pub mod error;
pub mod field;
pub mod hecke;
pub mod finchar;
pub mod intertwining;
pub mod matgroups;
pub mod nilpotent;
pub mod report;
pub mod squares;
pub mod verify;

pub use error::{Error, Result};
