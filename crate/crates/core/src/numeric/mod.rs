//! Special functions, compensated summation and interpolation.

mod gamma;
mod interp;
mod sum;
mod zeta;

pub use gamma::{gamma_ratio_half, ln_gamma};
pub use interp::QuinticTable;
pub use sum::{neumaier_sum, CompensatedComplex, Neumaier};
pub use zeta::{dirichlet_beta, dirichlet_eta, zeta, zeta_k};

pub use num_complex::Complex64 as C64;
