//! Flattened surfaces: plates stacked in face neighbourhoods, rods matching their
//! corners, boundary curves on the cusp tori, and the local moves that simplify
//! them towards carried position.

#![allow(clippy::needless_range_loop)]

pub mod boundary;
pub mod error;
pub mod frame;
pub mod moves;
pub mod patches;
pub mod simplify;
pub mod state;
pub mod status;

pub use error::EngineError;
pub use frame::Frame;
pub use moves::{apply_move, MoveKind, MoveRecord, MoveSpec};
pub use state::{Corner, FlattenedSurface, Plate};
