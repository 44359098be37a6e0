//! Exterior and leafwise forms, multivector fields and their operations.

pub mod forms;
pub mod multivector;
pub mod table;

pub use forms::{ExteriorForm, LeafwiseForm};
pub use multivector::{contravariant_d, schouten_bracket, MultivectorField, SCHOUTEN_SIGN};
pub use table::AltTable;
