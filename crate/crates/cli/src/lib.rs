//! Verifier for leafwise geometric quantization on foliated chart models.
//!
//! A model file describes a chart adapted to a foliation, a leafwise
//! symplectic structure, a prequantum connection, a polarization and some
//! observables; [`cli::execute`] runs the identity checks against it.

pub mod checks;
pub mod cli;
pub mod model;
pub mod report;
