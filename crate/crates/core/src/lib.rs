//! Two-period seasonal fractional ARIMA (SARFIMA) models.
//!
//! The process is `Phi(B) (1 - B^{s1})^{d1} (1 - B^{s2})^{d2} X_t = Theta(B) eps_t`.
//! The crate covers the model itself ([`model`]), periodograms and the
//! seasonal band plan ([`spectrum`]), the multi-band log-periodogram and
//! Whittle estimators ([`estimators`]), exact Gaussian simulation
//! ([`simulate`]), the applied filtering workflow ([`pipeline`]) and a
//! deterministic Monte Carlo harness ([`montecarlo`]).
//!
//! Numerical code is generic over [`Real`]; the aliases below fix `f64` (and
//! `f32` where it is useful).

// `!(a < b)` is used on purpose so that NaN takes the failure branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimators;
pub mod io;
pub mod model;
pub mod montecarlo;
pub mod pipeline;
pub mod scalar;
pub mod simulate;
pub mod spectrum;

pub use error::{Error, Result};
pub use scalar::{ExactField, Real};

pub type Spec = model::SarfimaSpec<f64>;
pub type SpecF32 = model::SarfimaSpec<f32>;
pub type Pgram = spectrum::Periodogram<f64>;
pub type PgramF32 = spectrum::Periodogram<f32>;
pub type Plan = spectrum::BandPlan<f64>;
pub type Estimate = estimators::MemoryEstimate<f64>;
pub type Fit = estimators::WhittleFit<f64>;
pub type Template = estimators::WhittleTemplate<f64>;
