//! Leafwise differential calculus, symplectic foliations and their leafwise
//! geometric quantization on a single adapted chart.

pub mod calculus;
pub mod error;
pub mod kernel;
pub mod linalg;
pub mod manifold;
pub mod poisson;
pub mod prequant;
pub mod quantization;
pub mod report;
pub mod sampling;
pub mod scalar;

pub use error::{Error, Result};
pub use kernel::{CExpr, Expr, ZeroTest};
pub use scalar::Scalar;
