//! Exact-arithmetic models of the operads underlying spaces of framed long knots:
//! b/w trees and their cell complexes, spineless cacti in three flavors,
//! Budney's overlapping intervals with the normalized subspace and its
//! projection onto cacti, compactified configuration spaces with operadic
//! insertion, and the cactus action on tower-stage mapping-space models.
//!
//! Combinatorial data (trees, arc lengths, interval endpoints, heights) is
//! kept in exact rational arithmetic so that operad axioms can be tested as
//! equalities.  Floating point enters only in the geometry of configurations
//! and knots.

pub mod action;
pub mod cacti;
pub mod cells;
pub mod configs;
pub mod error;
pub mod intervals;
pub mod knots;
pub mod perm;
pub mod pl;
pub mod rat;
pub mod samples;
pub mod trees;
pub mod verify;

pub use error::{Error, Result};
pub use rat::Q;
