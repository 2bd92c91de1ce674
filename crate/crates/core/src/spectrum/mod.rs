//! Periodogram and the seasonal-harmonic band plan.

mod bands;
mod periodogram;

pub use bands::{
    build_band_plan, build_band_plan_with, gph_t_bandwidth, gph_t_bandwidth_uncapped,
    ordered_periods, power_bandwidth, Band, BandPlan, BandPlanOptions,
};
pub use periodogram::{periodogram, periodogram_with, DftMethod, Periodogram, MIN_PERIODOGRAM_LEN};
