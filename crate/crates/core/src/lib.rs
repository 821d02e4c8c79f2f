pub mod algebra;
pub mod audit;
pub mod dirac;
pub mod error;
pub mod fourier;
pub mod geometry;
pub mod matrix;
pub mod real_structure;
pub mod scalar;
pub mod surfaces;

pub use error::{Error, Result};
