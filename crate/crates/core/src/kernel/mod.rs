//! Exact symbolic scalars: parsing, printing, differentiation, substitution
//! and zero testing.

pub mod complex;
mod modp;
pub mod expr;
pub mod parse;
pub mod poly;
pub mod zero;

pub use complex::CExpr;
pub use expr::{Bindings, Expr, Point};
pub use parse::{parse, parse_real};
pub use zero::{is_zero, ZeroTest};
