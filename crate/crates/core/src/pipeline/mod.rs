//! The applied workflow: bandwidth scans, removal of the fitted fractional
//! factors, and ACF/PACF diagnostics of what is left.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::{gph_estimate, gph_single, MemoryEstimate};
use crate::model::fractional_filter_coefficients;
use crate::scalar::Real;
use crate::spectrum::{build_band_plan, periodogram, power_bandwidth};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow<T> {
    pub alpha: f64,
    pub m: usize,
    pub estimate: Option<MemoryEstimate<T>>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandwidthScan<T> {
    pub periods: Vec<usize>,
    pub rows: Vec<ScanRow<T>>,
}

impl<T: Real> BandwidthScan<T> {
    /// CSV `alpha,m,d1_hat,d2_hat,var_d1,var_d2`; failed rows and the second
    /// memory of a single-period scan leave their fields empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,m,d1_hat,d2_hat,var_d1,var_d2\n");
        for r in &self.rows {
            let cell = |v: Option<T>| v.map(|x| format!("{x}")).unwrap_or_default();
            let e = r.estimate.as_ref();
            let d = |i: usize| e.and_then(|e| e.d_hat.get(i).copied());
            let v = |i: usize| e.and_then(|e| e.cov.get(i).map(|row| row[i]));
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.alpha,
                r.m,
                cell(d(0)),
                cell(d(1)),
                cell(v(0)),
                cell(v(1))
            ));
        }
        out
    }
}

/// One log-periodogram estimate per `alpha`, with `m = floor(n^alpha)`.
/// `s2 = None` scans the single-period estimator. A row whose bandwidth is
/// inadmissible records the error and the scan continues.
pub fn bandwidth_scan<T: Real>(
    series: &[T],
    s1: usize,
    s2: Option<usize>,
    alphas: &[f64],
) -> Result<BandwidthScan<T>> {
    if alphas.is_empty() {
        return Err(Error::InvalidArgument("no bandwidth exponents given".into()));
    }
    if let Some(a) = alphas.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
        return Err(Error::InvalidArgument(format!("alpha {a} is outside (0, 1)")));
    }
    if alphas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("alphas must be strictly increasing".into()));
    }
    if let Some(s2) = s2 {
        crate::spectrum::ordered_periods(s1, s2)?;
    }
    let pgram = periodogram(series, true)?;
    let n = series.len();
    let rows = alphas
        .iter()
        .map(|&alpha| {
            let m = power_bandwidth(n, alpha);
            let est = match s2 {
                Some(s2) => {
                    build_band_plan(n, s1, s2, m).and_then(|plan| gph_estimate(&pgram, &plan, s1, s2))
                }
                None => gph_single(&pgram, s1, m),
            };
            match est {
                Ok(e) => ScanRow {
                    alpha,
                    m,
                    estimate: Some(e),
                    error: None,
                },
                Err(e) => ScanRow {
                    alpha,
                    m,
                    estimate: None,
                    error: Some(format!("{}: {e}", e.code())),
                },
            }
        })
        .collect();
    let mut periods = vec![s1];
    periods.extend(s2);
    Ok(BandwidthScan { periods, rows })
}

/// Residuals `nu_t = sum_{j=0}^{t} pi*_j x_{t-j}` of the fractional factors
/// `prod (1 - B^{s_i})^{d_i}`, truncated at the available history.
pub fn fractional_filter<T: Real>(series: &[T], d_hat: &[T], periods: &[usize]) -> Result<Vec<T>> {
    if d_hat.len() != periods.len() || d_hat.is_empty() || d_hat.len() > 2 {
        return Err(Error::InvalidArgument(format!(
            "{} memories for {} periods",
            d_hat.len(),
            periods.len()
        )));
    }
    if let Some(d) = d_hat.iter().find(|d| !(d.abs() < T::one())) {
        return Err(Error::InvalidArgument(format!("memory {d} must satisfy |d| < 1")));
    }
    if series.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("series".into()));
    }
    let n = series.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let pi = fractional_filter_coefficients(d_hat, periods, n - 1)?;
    let nz: Vec<(usize, T)> = pi
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(j, &c)| (j, c))
        .collect();
    Ok((0..n)
        .map(|t| {
            nz.iter()
                .take_while(|(j, _)| *j <= t)
                .map(|&(j, c)| c * series[t - j])
                .sum()
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AcfPacf<T> {
    /// Lags `1..=max_lag`.
    pub acf: Vec<T>,
    pub pacf: Vec<T>,
    /// `1.96 / sqrt(n)`.
    pub band: T,
}

impl<T: Real> AcfPacf<T> {
    /// CSV `lag,acf,pacf,band`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lag,acf,pacf,band\n");
        for (i, (a, p)) in self.acf.iter().zip(&self.pacf).enumerate() {
            out.push_str(&format!("{},{a},{p},{}\n", i + 1, self.band));
        }
        out
    }
}

/// Sample ACF with divisor `n` and the PACF from it by Durbin-Levinson.
pub fn sample_acf_pacf<T: Real>(series: &[T], max_lag: usize) -> Result<AcfPacf<T>> {
    let n = series.len();
    if max_lag == 0 || 2 * max_lag >= n {
        return Err(Error::InvalidArgument(format!(
            "max lag {max_lag} must be positive and below n/2 = {}",
            n / 2
        )));
    }
    if series.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("series".into()));
    }
    let nf = T::from_usize_lossy(n);
    let mean = series.iter().copied().sum::<T>() / nf;
    let dev: Vec<T> = series.iter().map(|&x| x - mean).collect();
    let c0 = dev.iter().map(|&v| v * v).sum::<T>() / nf;
    if !(c0 > T::zero()) {
        return Err(Error::InvalidArgument("series has zero variance".into()));
    }
    let acf: Vec<T> = (1..=max_lag)
        .map(|h| (0..n - h).map(|t| dev[t] * dev[t + h]).sum::<T>() / nf / c0)
        .collect();
    let mut pacf = Vec::with_capacity(max_lag);
    let mut phi: Vec<T> = Vec::new();
    let mut v = T::one();
    for t in 1..=max_lag {
        let mut num = acf[t - 1];
        for k in 1..t {
            num -= phi[k - 1] * acf[t - k - 1];
        }
        let kappa = num / v;
        let mut next: Vec<T> = (1..t).map(|k| phi[k - 1] - kappa * phi[t - k - 1]).collect();
        next.push(kappa);
        phi = next;
        v *= T::one() - kappa * kappa;
        pacf.push(kappa);
    }
    Ok(AcfPacf {
        acf,
        pacf,
        band: T::lit(1.96) / nf.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    fn noise(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn zero_memory_filter_is_identity() {
        let x = noise(100, 1);
        assert_eq!(fractional_filter(&x, &[0.0, 0.0], &[4, 12]).unwrap(), x);
    }

    #[test]
    fn filter_then_inverse_recovers_series() {
        let x = noise(1024, 2);
        let y = fractional_filter(&x, &[0.3], &[4]).unwrap();
        let z = fractional_filter(&y, &[-0.3], &[4]).unwrap();
        // Truncating both filters at the same history makes them exact inverses.
        let dev = x.iter().zip(&z).skip(512).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(dev < 1e-3);
    }

    #[test]
    fn ar1_pacf_cuts_off() {
        let e = noise(20000, 3);
        let mut x = vec![0.0; e.len()];
        for t in 1..x.len() {
            x[t] = 0.5 * x[t - 1] + e[t];
        }
        let r = sample_acf_pacf(&x, 10).unwrap();
        assert!((r.pacf[0] - 0.5).abs() < 0.03);
        assert!(r.pacf[1..].iter().all(|p| p.abs() < 0.04));
        assert!((r.acf[0] - r.pacf[0]).abs() < 1e-12);
    }

    #[test]
    fn constant_series_is_rejected() {
        assert!(sample_acf_pacf(&[1.0; 50], 5).is_err());
    }

    #[test]
    fn scan_rows_and_failures() {
        let x = noise(1080, 4);
        let scan = bandwidth_scan(&x, 12, Some(4), &[0.3, 0.5, 0.62, 0.9]).unwrap();
        assert_eq!(scan.rows.len(), 4);
        assert!(scan.rows[0].estimate.is_some());
        assert!(scan.rows[3].estimate.is_none());
        assert!(scan.rows[3].error.as_deref().unwrap().starts_with("band-overlap"));
        let csv = scan.to_csv();
        assert!(csv.starts_with("alpha,m,d1_hat,d2_hat,var_d1,var_d2\n0.3,8,"));
        assert!(bandwidth_scan(&x, 12, Some(4), &[0.5, 0.4]).is_err());
        assert!(bandwidth_scan(&x, 12, Some(5), &[0.5]).is_err());
    }
}
