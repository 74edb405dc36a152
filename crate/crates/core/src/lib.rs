//! Non-degenerate resolutions of simplicial complexes.
//!
//! The crate builds the resolution `K̂ⁿ` of a finite simplicial complex,
//! lifts simplicial maps to non-degenerate ones, emits and replays
//! elementary-collapse certificates for `K̂ⁿ ↘ e(K♭)`, and works with finite
//! towers of simplicial maps. Integer homology serves as an independent check.

pub mod budget;
pub mod cells;
pub mod collapse;
pub mod complex;
pub mod error;
pub mod homology;
pub mod poset;
pub mod resolution;
pub mod text;
pub mod towers;

pub use budget::Budget;
pub use complex::{Simplex, SimplicialComplex, SimplicialMap, VertexId};
pub use error::{Error, Result};
