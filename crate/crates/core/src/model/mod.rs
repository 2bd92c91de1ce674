//! Model definition, admissibility, fractional filters and theoretical spectra.

mod density;
mod filter;
mod poles;
mod spec;

pub use density::{
    asymptotic_acvf, spectral_density, AcvfTerm, AsymptoticAcvf, SpectralDensity, SpectralValue,
};
pub use filter::{combined_filter_coefficients, fractional_filter_coefficients, pi_coefficients};
pub use poles::{enumerate_poles, Harmonic, Pole, PoleSet};
pub use spec::{
    check_stationary_invertible, require_stationary, roots_outside_unit_circle, LagPolynomial,
    SarfimaSpec, SeasonalComponent, ValidityReport, Violation,
};

