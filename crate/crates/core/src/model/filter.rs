use crate::error::{Error, Result};
use crate::model::spec::SarfimaSpec;
use crate::scalar::Real;

/// Coefficients `c_0..=c_max_lag` of `(1 - B^s)^d`.
///
/// Only lags that are multiples of `s` are non-zero; `c_{ks}` follows the
/// recursion `pi_0 = 1`, `pi_k = pi_{k-1} (k - 1 - d) / k`, which stays finite
/// far beyond the range where the Gamma-ratio form overflows.
pub fn pi_coefficients<T: Real>(d: T, s: usize, max_lag: usize) -> Result<Vec<T>> {
    if !d.is_finite() {
        return Err(Error::NonFinite("memory parameter".into()));
    }
    if s == 0 {
        return Err(Error::InvalidArgument("period must be >= 1".into()));
    }
    let mut out = vec![T::zero(); max_lag + 1];
    out[0] = T::one();
    let mut pi = T::one();
    let mut k = 1usize;
    while k * s <= max_lag {
        let kf = T::from_usize_lossy(k);
        pi = pi * (kf - T::one() - d) / kf;
        out[k * s] = pi;
        k += 1;
    }
    Ok(out)
}

/// Coefficients of `prod_i (1 - B^{s_i})^{d_i}` truncated at `max_lag`.
pub fn fractional_filter_coefficients<T: Real>(
    memories: &[T],
    periods: &[usize],
    max_lag: usize,
) -> Result<Vec<T>> {
    if memories.len() != periods.len() {
        return Err(Error::InvalidArgument(format!(
            "{} memory parameters for {} periods",
            memories.len(),
            periods.len()
        )));
    }
    let mut acc = vec![T::zero(); max_lag + 1];
    acc[0] = T::one();
    for (&d, &s) in memories.iter().zip(periods) {
        let f = pi_coefficients(d, s, max_lag)?;
        acc = convolve_sparse(&acc, &f, s, max_lag);
    }
    Ok(acc)
}

/// Coefficients `pi*_0..=pi*_max_lag` of the model's full fractional filter.
/// Applying these to `X_t` with positive memory removes the long memory.
pub fn combined_filter_coefficients<T: Real>(
    spec: &SarfimaSpec<T>,
    max_lag: usize,
) -> Result<Vec<T>> {
    spec.validate()?;
    fractional_filter_coefficients(&spec.memories(), &spec.periods(), max_lag)
}

// `b` is non-zero only on multiples of `step`.
fn convolve_sparse<T: Real>(a: &[T], b: &[T], step: usize, max_lag: usize) -> Vec<T> {
    let mut out = vec![T::zero(); max_lag + 1];
    for (i, &x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for j in (0..=max_lag - i).step_by(step) {
            out[i + j] += x * b[j];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ln_gamma_signed;
    use approx::assert_relative_eq;

    // Independent route: pi_k = Γ(k - d) / (Γ(k + 1) Γ(-d)) through log-Gamma.
    fn pi_gamma(d: f64, k: usize) -> f64 {
        if k == 0 {
            return 1.0;
        }
        let (a, sa) = ln_gamma_signed(k as f64 - d);
        let (b, _) = ln_gamma_signed(k as f64 + 1.0);
        let (c, sc) = ln_gamma_signed(-d);
        sa * sc * (a - b - c).exp()
    }

    #[test]
    fn first_difference() {
        assert_eq!(pi_coefficients(1.0, 1, 3).unwrap(), vec![1.0, -1.0, 0.0, 0.0]);
    }

    #[test]
    fn zero_memory_is_identity() {
        let c = pi_coefficients(0.0, 4, 8).unwrap();
        assert_eq!(c[0], 1.0);
        assert!(c[1..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn seasonal_lags_only() {
        let c = pi_coefficients(0.3, 4, 8).unwrap();
        assert_relative_eq!(c[4], -0.3, epsilon = 1e-15);
        assert_relative_eq!(c[8], -0.105, epsilon = 1e-15);
        assert_relative_eq!(c[8], pi_gamma(0.3, 2), max_relative = 1e-12);
        for j in [1, 2, 3, 5, 6, 7] {
            assert_eq!(c[j], 0.0);
        }
    }

    #[test]
    fn recursion_matches_gamma_ratio() {
        for &d in &[-0.45, -0.3, -0.1, 0.05, 0.2, 0.3, 0.45] {
            let c = pi_coefficients(d, 1, 200).unwrap();
            for k in 1..=200 {
                assert_relative_eq!(c[k], pi_gamma(d, k), max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn rejects_nan_memory() {
        assert!(pi_coefficients(f64::NAN, 1, 3).is_err());
    }

    #[test]
    fn magnitudes_decrease_past_first_seasonal_lag() {
        for &d in &[0.1_f64, 0.45, 0.9] {
            let c = pi_coefficients(d, 3, 600).unwrap();
            for k in 1..199 {
                assert!(c[(k + 1) * 3].abs() < c[k * 3].abs());
            }
        }
    }

    #[test]
    fn single_component_equals_pi_coefficients() {
        let spec = SarfimaSpec::new(&[(4, 0.3)], 1.0);
        assert_eq!(
            combined_filter_coefficients(&spec, 40).unwrap(),
            pi_coefficients(0.3, 4, 40).unwrap()
        );
    }

    #[test]
    fn zero_memories_give_impulse() {
        let spec = SarfimaSpec::new(&[(4, 0.0), (12, 0.0)], 1.0);
        let c = combined_filter_coefficients(&spec, 30).unwrap();
        assert_eq!(c[0], 1.0);
        assert!(c[1..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn two_component_product_matches_brute_force() {
        let spec = SarfimaSpec::new(&[(1, 0.1), (4, 0.3)], 1.0);
        let max = 40;
        let got = combined_filter_coefficients(&spec, max).unwrap();
        // Dense polynomial product of Gamma-evaluated factors.
        let a: Vec<f64> = (0..=max).map(|k| pi_gamma(0.1, k)).collect();
        let mut b = vec![0.0; max + 1];
        for k in 0..=max / 4 {
            b[4 * k] = pi_gamma(0.3, k);
        }
        for lag in 0..=max {
            let want: f64 = (0..=lag).map(|i| a[i] * b[lag - i]).sum();
            assert_relative_eq!(got[lag], want, max_relative = 1e-12, epsilon = 1e-15);
        }
        assert_relative_eq!(got[4], a[4] + a[0] * -0.3, max_relative = 1e-14);
        assert_relative_eq!(got[4], -0.3206625, max_relative = 1e-12);
    }
}
