//! Numerics, file formats and the command line for `gpbg-core`.

pub mod cli;
pub mod duhamel;
mod error;
pub mod estimates;
pub mod formats;
pub mod grid;
pub mod invariance;
pub mod nls;
pub mod quadrature;
pub mod report;
pub mod suite;
pub mod tensor;

pub use error::{GpbgError, Result};
