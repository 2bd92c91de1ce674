use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Exact Gaussian sampler from an autocovariance sequence by the
/// Durbin-Levinson recursion: `x_t = sum_k phi_{t,k} x_{t-k} + sqrt(v_t) z_t`.
#[derive(Debug, Clone)]
pub struct ExactSampler {
    n: usize,
    /// `phi_{t,1..=t}` for `t = 1..n`, packed row after row.
    phi: Vec<f64>,
    sd: Vec<f64>,
}

impl ExactSampler {
    /// Prepares a sampler for series of length `acvf.len()`.
    pub fn new(acvf: &[f64]) -> Result<Self> {
        let n = acvf.len();
        if n == 0 || !(acvf[0] > 0.0) {
            return Err(Error::NotPositiveDefinite {
                lag: 0,
                value: acvf.first().copied().unwrap_or(f64::NAN),
            });
        }
        let mut phi = Vec::with_capacity(n * (n - 1) / 2);
        let mut sd = Vec::with_capacity(n);
        let mut v = acvf[0];
        sd.push(v.sqrt());
        let mut prev: Vec<f64> = Vec::new();
        for t in 1..n {
            let mut num = acvf[t];
            for k in 1..t {
                num -= prev[k - 1] * acvf[t - k];
            }
            let kappa = num / v;
            if !(kappa.abs() < 1.0) {
                return Err(Error::NotPositiveDefinite { lag: t, value: kappa });
            }
            let mut cur = Vec::with_capacity(t);
            for k in 1..t {
                cur.push(prev[k - 1] - kappa * prev[t - k - 1]);
            }
            cur.push(kappa);
            v *= 1.0 - kappa * kappa;
            sd.push(v.sqrt());
            phi.extend_from_slice(&cur);
            prev = cur;
        }
        Ok(Self { n, phi, sd })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Partial autocorrelations `phi_{t,t}`, `t = 1..n`.
    pub fn partial_correlations(&self) -> Vec<f64> {
        (1..self.n).map(|t| self.phi[t * (t + 1) / 2 - 1]).collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.n);
        for t in 0..self.n {
            let z: f64 = rng.sample(StandardNormal);
            let mean = if t == 0 {
                0.0
            } else {
                let row = &self.phi[t * (t - 1) / 2..t * (t + 1) / 2];
                row.iter().zip(x.iter().rev()).map(|(p, v)| p * v).sum()
            };
            x.push(mean + self.sd[t] * z);
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ar1_partial_correlations_cut_off() {
        let acvf: Vec<f64> = (0..20).map(|h| 0.6f64.powi(h) / 0.64).collect();
        let s = ExactSampler::new(&acvf).unwrap();
        let pc = s.partial_correlations();
        assert!((pc[0] - 0.6).abs() < 1e-12);
        assert!(pc[1..].iter().all(|v| v.abs() < 1e-12));
        assert!((s.sd[5] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_positive_definite_is_an_error() {
        assert!(matches!(
            ExactSampler::new(&[1.0, 1.0, 0.5]),
            Err(Error::NotPositiveDefinite { lag: 1, .. })
        ));
        assert!(ExactSampler::new(&[1.0, 0.9, -0.9]).is_err());
    }
}
