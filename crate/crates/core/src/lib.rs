//! Max-times linear algebra built around diagonal similarity scaling.

pub mod asymptotics;
pub mod balancing;
pub mod cli;
pub mod commuting;
pub mod convert;
pub mod digraph;
pub mod error;
pub mod io;
pub mod matrix;
pub mod scalar;
pub mod scaling;
pub mod spectral;

pub use error::{Error, Result};
pub use matrix::{MaxMatrix, MaxVector};
pub use scalar::{MaxPlus, Rational, Scalar};
