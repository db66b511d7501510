//! Smoothing kernels, central L-values and the diagnostic bounds around them.

mod afe;
mod bounds;
mod kernel;

pub use afe::{
    central_value, dirichlet_poly_a, mollified_afe_a_t, tail_bound, truncation, AfeContext,
    CentralValue, DEFAULT_AFE_TOL, DEFAULT_MAX_NORM,
};
pub use bounds::{
    grh_log_bound, script_l, script_l_m_v, shifted_moment_envelope, GrhLogBound,
    ShiftedBoundParams, LAMBDA_0,
};
pub use kernel::{v1_series, KernelTable, SmoothingKernel, A_CONST, TABLE_STEP, TABLE_T_MIN};
pub use crate::numeric::zeta_k;
