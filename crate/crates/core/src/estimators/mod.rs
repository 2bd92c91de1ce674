//! Memory estimators: the multi-band log-periodogram regression, its
//! single-period form, the asymptotic design matrix and the Whittle fit.

mod covariance;
mod gph;
pub mod simplex;
mod whittle;

pub use covariance::{
    asymptotic_cov_matrix, asymptotic_variance_single, design_matrix_q, design_matrix_q_inverse,
};
pub use gph::{gph_estimate, gph_single, gph_single_with_plan, MemoryEstimate, Method};
pub use whittle::{
    whittle_estimate, whittle_from_periodogram, FreeParameters, WhittleFit, WhittleObjective,
    WhittleOptions, WhittleTemplate, MIN_WHITTLE_LEN,
};
