//! Quadratic Hecke characters over Q(i): residue symbols, Gauss sums, central
//! values and moment statistics.

pub mod chars;
pub mod error;
pub mod gauss;
pub mod gint;
pub mod lfun;
pub mod moments;
pub mod numeric;
pub mod products;

pub use error::{Error, Result};
pub use gint::GInt;
