use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MIN_PERIODOGRAM_LEN: usize = 8;

/// Periodogram ordinates `I(lambda_j) = |sum_t x_t e^{i lambda_j t}|^2 / (2 pi n)`
/// at the Fourier frequencies `lambda_j = 2 pi j / n`, `j = 1..n-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Periodogram<T> {
    pub n: usize,
    /// `ordinates[j - 1] = I(lambda_j)`.
    pub ordinates: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DftMethod {
    Fft,
    Direct,
}

impl<T: Real> Periodogram<T> {
    pub fn ordinate(&self, j: usize) -> T {
        self.ordinates[j - 1]
    }

    pub fn frequency(&self, j: usize) -> T {
        T::TAU() * T::from_usize_lossy(j) / T::from_usize_lossy(self.n)
    }

    /// CSV `j,lambda,ordinate`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,lambda,ordinate\n");
        for (j, lam, v) in self.iter() {
            out.push_str(&format!("{j},{lam},{v}\n"));
        }
        out
    }

    /// `(j, lambda_j, I_j)` for `j = 1..n-1`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, T, T)> + '_ {
        self.ordinates
            .iter()
            .enumerate()
            .map(move |(i, &v)| (i + 1, self.frequency(i + 1), v))
    }
}

pub fn periodogram<T: Real>(series: &[T], subtract_mean: bool) -> Result<Periodogram<T>> {
    // Small inputs go through the direct sum; both routes agree to rounding.
    let method = if series.len() < 64 {
        DftMethod::Direct
    } else {
        DftMethod::Fft
    };
    periodogram_with(series, subtract_mean, method)
}

pub fn periodogram_with<T: Real>(
    series: &[T],
    subtract_mean: bool,
    method: DftMethod,
) -> Result<Periodogram<T>> {
    let n = series.len();
    if n < MIN_PERIODOGRAM_LEN {
        return Err(Error::TooShort {
            needed: MIN_PERIODOGRAM_LEN,
            got: n,
        });
    }
    if series.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("series".into()));
    }
    let mean = if subtract_mean {
        series.iter().copied().sum::<T>() / T::from_usize_lossy(n)
    } else {
        T::zero()
    };
    let scale = T::one() / (T::TAU() * T::from_usize_lossy(n));
    let ordinates = match method {
        DftMethod::Fft => {
            let mut buf: Vec<Complex<T>> =
                series.iter().map(|&x| Complex::new(x - mean, T::zero())).collect();
            FftPlanner::new().plan_fft_forward(n).process(&mut buf);
            buf[1..].iter().map(|c| c.norm_sqr() * scale).collect()
        }
        DftMethod::Direct => (1..n)
            .map(|j| {
                let (mut re, mut im) = (T::zero(), T::zero());
                for (t, &x) in series.iter().enumerate() {
                    // Reduce j t mod n exactly before forming the angle.
                    let r = (j * t) % n;
                    let ang = T::TAU() * T::from_usize_lossy(r) / T::from_usize_lossy(n);
                    let (s, c) = ang.sin_cos();
                    re += (x - mean) * c;
                    im += (x - mean) * s;
                }
                (re * re + im * im) * scale
            })
            .collect(),
    };
    Ok(Periodogram { n, ordinates })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn noise(n: usize, seed: u64) -> Vec<f64> {
        // Small LCG keeps this test independent of the simulation module.
        let mut s = seed;
        (0..n)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            })
            .collect()
    }

    #[test]
    fn constant_series_has_zero_ordinates() {
        let p = periodogram(&vec![3.5_f64; 100], true).unwrap();
        assert!(p.ordinates.iter().all(|&v| v.abs() < 1e-25));
    }

    #[test]
    fn parseval_identity() {
        for &n in &[64usize, 100, 1080, 257] {
            let x = noise(n, n as u64);
            let p = periodogram(&x, true).unwrap();
            let total: f64 = p.ordinates.iter().sum::<f64>() * std::f64::consts::TAU / n as f64;
            let mean = x.iter().sum::<f64>() / n as f64;
            let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
            assert_relative_eq!(total, var, max_relative = 1e-10);
        }
    }

    #[test]
    fn fft_and_direct_agree() {
        let x = noise(210, 7);
        let a = periodogram_with(&x, true, DftMethod::Fft).unwrap();
        let b = periodogram_with(&x, true, DftMethod::Direct).unwrap();
        for (u, v) in a.ordinates.iter().zip(&b.ordinates) {
            assert_relative_eq!(u, v, max_relative = 1e-10, epsilon = 1e-14);
        }
    }

    #[test]
    fn pure_cosine_concentrates() {
        let n = 512;
        let j0 = 37;
        let x: Vec<f64> = (1..=n)
            .map(|t| (std::f64::consts::TAU * j0 as f64 * t as f64 / n as f64).cos())
            .collect();
        let p = periodogram(&x, false).unwrap();
        let peak = p.ordinate(j0);
        assert!(peak >= n as f64 / (16.0 * std::f64::consts::PI));
        for j in 1..n {
            if j != j0 && j != n - j0 {
                assert!(p.ordinate(j) <= 1e-8 * peak);
            }
        }
    }

    #[test]
    fn symmetric_and_nonnegative() {
        let x = noise(333, 3);
        let p = periodogram(&x, false).unwrap();
        for j in 1..333 {
            assert!(p.ordinate(j) >= 0.0);
            assert_relative_eq!(p.ordinate(j), p.ordinate(333 - j), max_relative = 1e-9);
        }
    }

    #[test]
    fn rejects_short_and_non_finite() {
        assert!(matches!(periodogram(&[1.0; 7], true), Err(Error::TooShort { .. })));
        let mut x = vec![0.0; 20];
        x[3] = f64::INFINITY;
        assert!(matches!(periodogram(&x, true), Err(Error::NonFinite(_))));
    }
}
