use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Standardized {
    pub values: Vec<f64>,
    pub mean: f64,
    pub sd: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

/// `(x - mean) / sd` for one component of a list of estimate vectors, with
/// moment-based skewness `m3 / m2^{3/2}` and excess kurtosis `m4 / m2^2 - 3`.
/// `sd` uses divisor `k - 1`.
pub fn standardized_sample(estimates: &[Vec<f64>], component: usize) -> Result<Standardized> {
    if estimates.len() < 100 {
        return Err(Error::InvalidArgument(format!(
            "need at least 100 estimates, got {}",
            estimates.len()
        )));
    }
    let x: Vec<f64> = estimates
        .iter()
        .map(|v| {
            v.get(component).copied().ok_or_else(|| {
                Error::InvalidArgument(format!("estimate has no component {component}"))
            })
        })
        .collect::<Result<_>>()?;
    let k = x.len() as f64;
    let mean = x.iter().sum::<f64>() / k;
    let m2 = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / k;
    if !(m2 > 0.0) {
        return Err(Error::InvalidArgument("estimates have zero spread".into()));
    }
    let m3 = x.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / k;
    let m4 = x.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / k;
    let sd = (m2 * k / (k - 1.0)).sqrt();
    Ok(Standardized {
        values: x.iter().map(|v| (v - mean) / sd).collect(),
        mean,
        sd,
        skewness: m3 / m2.powf(1.5),
        excess_kurtosis: m4 / (m2 * m2) - 3.0,
    })
}

pub(crate) fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let k = a.len() as f64;
    let ma = a.iter().sum::<f64>() / k;
    let mb = b.iter().sum::<f64>() / k;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    (sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, Exp1};

    #[test]
    fn standardized_has_unit_moments() {
        let est: Vec<Vec<f64>> = (0..500).map(|i| vec![(i as f64 * 0.37).sin(), 0.0]).collect();
        let s = standardized_sample(&est, 0).unwrap();
        let k = s.values.len() as f64;
        let mean = s.values.iter().sum::<f64>() / k;
        let var = s.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
        assert!(mean.abs() < 1e-12);
        assert!((var.sqrt() - 1.0).abs() < 1e-12);
        assert!(standardized_sample(&est, 1).is_err());
        assert!(standardized_sample(&est[..50], 0).is_err());
    }

    #[test]
    fn exponential_skewness_is_two() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let est: Vec<Vec<f64>> = (0..200_000).map(|_| vec![Exp1.sample(&mut rng)]).collect();
        let s = standardized_sample(&est, 0).unwrap();
        assert!((s.skewness - 2.0).abs() < 0.1, "{}", s.skewness);
        assert!((s.excess_kurtosis - 6.0).abs() < 1.0, "{}", s.excess_kurtosis);
    }

    #[test]
    fn correlation_bounds() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert!((correlation(&a, &a) - 1.0).abs() < 1e-15);
        let b = [4.0, 3.0, 2.0, 1.0];
        assert!((correlation(&a, &b) + 1.0).abs() < 1e-15);
    }
}
