//! Taut and veering ideal triangulations: combinatorics, homology, cones and
//! carried surfaces.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod isosig;
pub mod perm;
pub mod tri;

pub use error::{Axiom, TriError};
pub use perm::Perm4;
pub use tri::{parse_triangulation, serialize, EdgeStar, GluingDocument, TautTriangulation};
pub mod veering;
pub mod dual;
pub mod cones;
pub mod homology;
pub mod snf;
pub mod carried;
