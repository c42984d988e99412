//! Discrete gap eigenvalues of the defocusing NLS Lax operator with
//! non-vanishing potentials.

pub mod bounds;
pub mod direct;
pub mod discretize;
pub mod eigensolve;
pub mod gap;
pub mod error;
pub mod grid;
pub mod kbeta;
pub mod oracle;
pub mod potential;
pub mod transform;

pub use error::{Error, Result};
pub use grid::Grid;
