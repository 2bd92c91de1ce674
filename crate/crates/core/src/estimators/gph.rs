use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::covariance::scaled_inverse;
use crate::scalar::Real;
use crate::spectrum::{BandPlan, Periodogram};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    GphMulti,
    GphSingle,
    Whittle,
}

/// Estimated memory parameters with their covariance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MemoryEstimate<T> {
    pub method: Method,
    /// One entry per period, in the order the periods were given.
    pub d_hat: Vec<T>,
    /// Asymptotic covariance `pi^2 / (6 m) Q^{-1}`.
    pub cov: Vec<Vec<T>>,
    pub m: usize,
    pub periods: Vec<usize>,
    pub band_count: usize,
    pub points: usize,
    /// Finite-sample OLS covariance `pi^2 / 6 (Z'Z)^{-1}` of the centred regressors.
    pub regression_cov: Vec<Vec<T>>,
    pub off_grid_centers: bool,
}

impl<T: Real> MemoryEstimate<T> {
    /// Asymptotic standard errors.
    pub fn se(&self) -> Vec<T> {
        (0..self.d_hat.len()).map(|i| self.cov[i][i].sqrt()).collect()
    }

    pub fn regression_se(&self) -> Vec<T> {
        (0..self.d_hat.len())
            .map(|i| self.regression_cov[i][i].sqrt())
            .collect()
    }
}

/// Multi-band log-periodogram regression for two periods.
///
/// Within each band the responses `ln I` and the regressors
/// `Z_i = -2 ln |2 sin(s_i lambda / 2)|` are centred by their band mean, and
/// `(d1, d2)` solves the pooled no-intercept least squares problem.
pub fn gph_estimate<T: Real>(
    pgram: &Periodogram<T>,
    plan: &BandPlan<T>,
    s1: usize,
    s2: usize,
) -> Result<MemoryEstimate<T>> {
    let mut expected = plan.periods();
    let mut given = vec![s1, s2];
    expected.sort_unstable();
    given.sort_unstable();
    if plan.s_small.is_none() || expected != given {
        return Err(Error::InvalidArgument(format!(
            "band plan was built for periods {:?}, not ({s1}, {s2})",
            plan.periods()
        )));
    }
    check_plan(pgram, plan)?;
    let periods = [s1, s2];
    let mut zz = [[T::zero(); 2]; 2];
    let mut zy = [T::zero(); 2];
    for_each_band(pgram, plan, &periods, |z, y| {
        for a in 0..2 {
            zy[a] += z[a] * y;
            for b in 0..2 {
                zz[a][b] += z[a] * z[b];
            }
        }
    })?;
    let det = zz[0][0] * zz[1][1] - zz[0][1] * zz[1][0];
    if !(det > T::lit(1e-10) * zz[0][0] * zz[1][1]) {
        return Err(Error::RankDeficient(format!(
            "periods {s1} and {s2} give proportional regressors over {} bands",
            plan.bands.len()
        )));
    }
    let inv = [
        [zz[1][1] / det, -zz[0][1] / det],
        [-zz[1][0] / det, zz[0][0] / det],
    ];
    let d_hat = vec![
        inv[0][0] * zy[0] + inv[0][1] * zy[1],
        inv[1][0] * zy[0] + inv[1][1] * zy[1],
    ];
    let c = T::PI() * T::PI() / T::lit(6.0);
    let regression_cov = inv.iter().map(|r| r.iter().map(|&v| c * v).collect()).collect();
    Ok(MemoryEstimate {
        method: Method::GphMulti,
        d_hat,
        cov: cast_matrix(scaled_inverse(&periods, plan.m)?),
        m: plan.m,
        periods: periods.to_vec(),
        band_count: plan.bands.len(),
        points: plan.point_count(),
        regression_cov,
        off_grid_centers: plan.off_grid_centers,
    })
}

/// Single-period estimator with bandwidth `m` around every harmonic of `s`.
pub fn gph_single<T: Real>(pgram: &Periodogram<T>, s: usize, m: usize) -> Result<MemoryEstimate<T>> {
    let plan = BandPlan::single(pgram.n, s, m)?;
    gph_single_with_plan(pgram, &plan)
}

pub fn gph_single_with_plan<T: Real>(
    pgram: &Periodogram<T>,
    plan: &BandPlan<T>,
) -> Result<MemoryEstimate<T>> {
    if plan.s_small.is_some() {
        return Err(Error::InvalidArgument(
            "single-period estimator needs a single-period band plan".into(),
        ));
    }
    check_plan(pgram, plan)?;
    let s = plan.s_prime;
    let (mut zz, mut zy) = (T::zero(), T::zero());
    for_each_band(pgram, plan, &[s], |z, y| {
        zz += z[0] * z[0];
        zy += z[0] * y;
    })?;
    if !(zz > T::zero()) {
        return Err(Error::RankDeficient(format!("period {s} gives a constant regressor")));
    }
    let c = T::PI() * T::PI() / T::lit(6.0);
    Ok(MemoryEstimate {
        method: Method::GphSingle,
        d_hat: vec![zy / zz],
        cov: cast_matrix(scaled_inverse(&[s], plan.m)?),
        m: plan.m,
        periods: vec![s],
        band_count: plan.bands.len(),
        points: plan.point_count(),
        regression_cov: vec![vec![c / zz]],
        off_grid_centers: plan.off_grid_centers,
    })
}

/// `-2 ln |2 sin(s pi j / n)|` evaluated with `s j` reduced modulo `2 n`.
pub(crate) fn log_sine_regressor<T: Real>(s: usize, j: usize, n: usize) -> T {
    let r = (s * j) % (2 * n);
    let angle = T::PI() * T::from_usize_lossy(r) / T::from_usize_lossy(n);
    -T::lit(2.0) * (T::lit(2.0) * angle.sin()).abs().ln()
}

fn check_plan<T: Real>(pgram: &Periodogram<T>, plan: &BandPlan<T>) -> Result<()> {
    if plan.n != pgram.n {
        return Err(Error::InvalidArgument(format!(
            "band plan is for n={}, periodogram has n={}",
            plan.n, pgram.n
        )));
    }
    Ok(())
}

/// Calls `visit(z, y)` with band-centred regressors and response for every
/// regression point.
fn for_each_band<T: Real, const P: usize>(
    pgram: &Periodogram<T>,
    plan: &BandPlan<T>,
    periods: &[usize; P],
    mut visit: impl FnMut(&[T; P], T),
) -> Result<()> {
    let n = pgram.n;
    for band in &plan.bands {
        let count = T::from_usize_lossy(band.offsets.len());
        let mut rows = Vec::with_capacity(band.offsets.len());
        let mut zbar = [T::zero(); P];
        let mut ybar = T::zero();
        for j in band.indices() {
            let v = pgram.ordinate(j);
            if !(v > T::zero()) {
                return Err(Error::ZeroOrdinate(j));
            }
            let y = v.ln();
            let mut z = [T::zero(); P];
            for (zi, &s) in z.iter_mut().zip(periods) {
                *zi = log_sine_regressor(s, j, n);
                if !zi.is_finite() {
                    return Err(Error::RankDeficient(format!(
                        "Fourier index {j} sits on a harmonic of period {s}"
                    )));
                }
            }
            for i in 0..P {
                zbar[i] += z[i];
            }
            ybar += y;
            rows.push((z, y));
        }
        for i in 0..P {
            zbar[i] /= count;
        }
        ybar /= count;
        for (mut z, y) in rows {
            for i in 0..P {
                z[i] -= zbar[i];
            }
            visit(&z, y - ybar);
        }
    }
    Ok(())
}

fn cast_matrix<T: Real>(m: Vec<Vec<f64>>) -> Vec<Vec<T>> {
    m.into_iter()
        .map(|r| r.into_iter().map(T::lit).collect())
        .collect()
}
