pub mod error;
pub mod matrixcore;
pub mod orderrel;
pub mod commutant;
pub mod effects;
pub mod projective;
pub mod reconstruct;
pub mod suites;
pub mod symmetry;

pub use error::{Error, Result};
