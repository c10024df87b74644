//! Exact verification engine for descent conditions of lattice field theories.

pub mod algebra;
pub mod aqft;
pub mod descent;
pub mod error;
pub mod kg;
pub mod lattice;
pub mod linalg;
pub mod report;
pub mod site;

pub use error::{Error, Result};
pub use lattice::{Backend, Dir, Embedding, Pt, PointSet, Region, Spacetime, Strictness};
