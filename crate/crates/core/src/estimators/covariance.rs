use crate::error::{Error, Result};
use crate::scalar::{invert_small, ExactField};
use crate::spectrum::ordered_periods;

/// Design matrix `Q` of the pooled regression, rows in the order of `periods`.
///
/// With `s'` the larger period and `I` the harmonics of `s'` that are also
/// harmonics of the smaller period,
/// `Q = 4 [[sum_k delta_k, sum_I delta_k], [sum_I delta_k, sum_I delta_k]]`
/// in `(s', smaller)` order. A single period `s` gives `Q = [4 s]`.
pub fn design_matrix_q<F: ExactField>(periods: &[usize]) -> Result<Vec<Vec<F>>> {
    let four = F::from_u8(4).expect("small integer");
    match *periods {
        [s] => {
            if s == 0 {
                return Err(Error::InvalidArgument("period must be >= 1".into()));
            }
            Ok(vec![vec![four * weight_sum::<F>(s, |_| true)]])
        }
        [s1, s2] => {
            let (large, small) = ordered_periods(s1, s2)?;
            let all = four.clone() * weight_sum::<F>(large, |_| true);
            let shared = four * weight_sum::<F>(large, |k| (k * small) % large == 0);
            let q = vec![vec![all, shared.clone()], vec![shared.clone(), shared]];
            if s1 >= s2 {
                Ok(q)
            } else {
                Ok(vec![
                    vec![q[1][1].clone(), q[1][0].clone()],
                    vec![q[0][1].clone(), q[0][0].clone()],
                ])
            }
        }
        _ => Err(Error::InvalidArgument(format!(
            "expected 1 or 2 periods, got {}",
            periods.len()
        ))),
    }
}

/// `Q^{-1}` in exact arithmetic.
pub fn design_matrix_q_inverse<F: ExactField>(periods: &[usize]) -> Result<Vec<Vec<F>>> {
    let q = design_matrix_q::<F>(periods)?;
    invert_small(&q).ok_or_else(|| Error::RankDeficient("design matrix Q is singular".into()))
}

/// Asymptotic covariance `pi^2 / (6 m) Q^{-1}` of the two-period estimator,
/// in the order `(s1, s2)`.
pub fn asymptotic_cov_matrix(n: usize, s1: usize, s2: usize, m: usize) -> Result<Vec<Vec<f64>>> {
    let (large, _) = ordered_periods(s1, s2)?;
    check_bandwidth(n, large, m)?;
    scaled_inverse(&[s1, s2], m)
}

/// `pi^2 / (24 s m)`, the asymptotic variance of the single-period estimator.
pub fn asymptotic_variance_single(s: usize, m: usize) -> f64 {
    std::f64::consts::PI.powi(2) / (24.0 * s as f64 * m as f64)
}

pub(crate) fn scaled_inverse(periods: &[usize], m: usize) -> Result<Vec<Vec<f64>>> {
    type Q = num_rational::Ratio<i64>;
    let inv = design_matrix_q_inverse::<Q>(periods)?;
    let scale = std::f64::consts::PI.powi(2) / (6.0 * m as f64);
    Ok(inv
        .iter()
        .map(|row| {
            row.iter()
                .map(|r| scale * (*r.numer() as f64 / *r.denom() as f64))
                .collect()
        })
        .collect())
}

fn check_bandwidth(n: usize, s_prime: usize, m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::BandwidthTooSmall(m));
    }
    if 2 * m * s_prime >= n {
        return Err(Error::BandOverlap { m, n, s_prime });
    }
    Ok(())
}

fn weight_sum<F: ExactField>(s_prime: usize, keep: impl Fn(usize) -> bool) -> F {
    let mut total = 0u32;
    for k in 0..=s_prime / 2 {
        if !keep(k) {
            continue;
        }
        total += if k == 0 || 2 * k == s_prime { 1 } else { 2 };
    }
    F::from_u32(total).expect("small integer")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    type R = Ratio<i64>;

    fn r(a: i64, b: i64) -> R {
        Ratio::new(a, b)
    }

    #[test]
    fn q_for_twelve_and_four() {
        let q = design_matrix_q::<R>(&[12, 4]).unwrap();
        assert_eq!(q, vec![vec![r(48, 1), r(16, 1)], vec![r(16, 1), r(16, 1)]]);
        let inv = design_matrix_q_inverse::<R>(&[12, 4]).unwrap();
        assert_eq!(inv, vec![vec![r(1, 32), r(-1, 32)], vec![r(-1, 32), r(3, 32)]]);
    }

    #[test]
    fn q_for_four_and_one_in_either_order() {
        let q = design_matrix_q::<R>(&[4, 1]).unwrap();
        assert_eq!(q, vec![vec![r(16, 1), r(4, 1)], vec![r(4, 1), r(4, 1)]]);
        let swapped = design_matrix_q::<R>(&[1, 4]).unwrap();
        assert_eq!(swapped, vec![vec![r(4, 1), r(4, 1)], vec![r(4, 1), r(16, 1)]]);
    }

    #[test]
    fn single_period() {
        assert_eq!(design_matrix_q::<R>(&[7]).unwrap(), vec![vec![r(28, 1)]]);
        let v = scaled_inverse(&[4], 134).unwrap()[0][0];
        assert!((v - asymptotic_variance_single(4, 134)).abs() < 1e-18);
        assert!((asymptotic_variance_single(4, 134) - 7.67e-4).abs() < 1e-6);
    }

    #[test]
    fn smaller_period_has_larger_variance() {
        for &sp in &[4usize, 8, 12] {
            for &s2 in &[1usize, 2, 4] {
                if s2 >= sp || sp % s2 != 0 {
                    continue;
                }
                let c = scaled_inverse(&[sp, s2], 10).unwrap();
                assert!(c[0][0] > 0.0 && c[1][1] > 0.0);
                assert!(c[1][1] >= c[0][0], "s'={sp} s2={s2}");
            }
        }
    }

    #[test]
    fn guards() {
        assert!(matches!(
            asymptotic_cov_matrix(1080, 12, 5, 10),
            Err(Error::NotDivisor { .. })
        ));
        assert!(asymptotic_cov_matrix(1080, 12, 12, 10).is_err());
        assert!(asymptotic_cov_matrix(100, 12, 4, 10).is_err());
    }
}
