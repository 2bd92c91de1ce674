use crate::error::{Error, Result};
use crate::model::poles::{enumerate_poles, Harmonic, PoleSet};
use crate::model::spec::{require_stationary, transfer_modulus_sq, SarfimaSpec};
use crate::scalar::{gamma, Real};

/// Value of the spectral density at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralValue<T> {
    Finite(T),
    /// The frequency is a harmonic with positive total memory.
    Pole,
}

impl<T: Real> SpectralValue<T> {
    pub fn is_pole(&self) -> bool {
        matches!(self, SpectralValue::Pole)
    }

    /// `+inf` at a pole.
    pub fn value(&self) -> T {
        match *self {
            SpectralValue::Finite(v) => v,
            SpectralValue::Pole => T::infinity(),
        }
    }
}

/// Evaluates `f(lambda) = f_nu(lambda) prod_i |2 sin(lambda s_i / 2)|^{-2 d_i}`
/// for a stationary model, with `f_nu = sigma2 / (2 pi) |Theta / Phi|^2`.
#[derive(Debug, Clone)]
pub struct SpectralDensity<T> {
    periods: Vec<usize>,
    memories: Vec<T>,
    ar: Vec<T>,
    ma: Vec<T>,
    scale: T,
}

impl<T: Real> SpectralDensity<T> {
    pub fn new(spec: &SarfimaSpec<T>) -> Result<Self> {
        require_stationary(spec)?;
        Ok(Self::unchecked(spec))
    }

    pub(crate) fn unchecked(spec: &SarfimaSpec<T>) -> Self {
        Self {
            periods: spec.periods(),
            memories: spec.memories(),
            ar: spec.ar_polynomial(),
            ma: spec.ma_polynomial(),
            scale: spec.sigma2 / T::TAU(),
        }
    }

    /// Short-memory part `f_nu(lambda)`.
    pub fn arma_part(&self, lambda: T) -> T {
        self.scale * transfer_modulus_sq(&self.ma, lambda) / transfer_modulus_sq(&self.ar, lambda)
    }

    pub fn at(&self, lambda: T) -> SpectralValue<T> {
        let two = T::lit(2.0);
        let tol = T::epsilon() * T::lit(64.0);
        let mut total_at_harmonic = T::zero();
        let mut factor = T::one();
        for (&s, &d) in self.periods.iter().zip(&self.memories) {
            if d.is_zero() {
                continue;
            }
            let sf = T::from_usize_lossy(s);
            let x = lambda * sf / T::TAU();
            if (x - x.round()).abs() <= tol * x.abs().max(T::one()) {
                // Near the harmonic |2 sin(s u / 2)| ~ s |u|; keep the constant
                // so that cancelling memories leave the right finite limit.
                total_at_harmonic += d;
                factor *= sf.powf(-two * d);
            } else {
                let v = (two * (lambda * sf / two).sin()).abs();
                factor *= v.powf(-two * d);
            }
        }
        if total_at_harmonic > T::zero() {
            SpectralValue::Pole
        } else if total_at_harmonic < T::zero() {
            SpectralValue::Finite(T::zero())
        } else {
            SpectralValue::Finite(self.arma_part(lambda) * factor)
        }
    }

    /// Density at `lambda = 2 pi h.num / h.den + offset`, resolving the sines
    /// of harmonics through exact integer reduction so that tiny offsets from
    /// a pole keep full relative accuracy.
    pub fn near(&self, h: Harmonic, offset: T) -> T {
        let two = T::lit(2.0);
        let lambda = h.frequency::<T>() + offset;
        let mut factor = T::one();
        for (&s, &d) in self.periods.iter().zip(&self.memories) {
            if d.is_zero() {
                continue;
            }
            let sf = T::from_usize_lossy(s);
            // lambda s / 2 = pi r / den + s offset / 2, r = num s mod 2 den
            let r = (h.num * s) % (2 * h.den);
            let y = sf * offset / two;
            let sine = if r == 0 {
                y.sin()
            } else if r == h.den {
                -y.sin()
            } else {
                (T::PI() * T::from_usize_lossy(r) / T::from_usize_lossy(h.den) + y).sin()
            };
            factor *= (two * sine).abs().powf(-two * d);
        }
        self.arma_part(lambda) * factor
    }
}

/// Theoretical spectral density of a stationary model at `lambda`.
pub fn spectral_density<T: Real>(spec: &SarfimaSpec<T>, lambda: T) -> Result<SpectralValue<T>> {
    Ok(SpectralDensity::new(spec)?.at(lambda))
}

/// One term `a |h|^{2e - 1} cos(h lambda)` of the asymptotic autocovariance.
#[derive(Debug, Clone, PartialEq)]
pub struct AcvfTerm<T> {
    pub frequency: T,
    pub memory: T,
    pub amplitude: T,
}

/// Large-lag autocovariance `gamma(h) ~ sum_p a_p |h|^{2 e_p - 1} cos(h lambda_p)`.
///
/// One term per distinct pole of [`enumerate_poles`], including 0 and pi;
/// shared frequencies enter once with their merged exponent. For a pole with
/// local memory `e` (the merged exponent in the interior, twice it at 0 and
/// pi):
///
/// `a'_p = sigma2 / pi |Theta/Phi(e^{-i lambda_p})|^2 Gamma(1 - 2e) sin(pi e) D_p^2`,
///
/// doubled for interior poles, where `D_p^2` collects the remaining factors
/// `|2 sin lambda_p|^{-2 e}` (interior only) and
/// `|2 (cos lambda_p - cos lambda_q)|^{-2 d_q}` over the other poles `q`.
#[derive(Debug, Clone)]
pub struct AsymptoticAcvf<T> {
    pub terms: Vec<AcvfTerm<T>>,
}

impl<T: Real> AsymptoticAcvf<T> {
    pub fn new(spec: &SarfimaSpec<T>) -> Result<Self> {
        require_stationary(spec)?;
        let poles: PoleSet<f64> = enumerate_poles(&spec.cast::<f64>());
        if !poles.iter().any(|p| p.exponent > 0.0) {
            return Err(Error::InvalidArgument(
                "asymptotic autocovariance needs a pole with positive memory".into(),
            ));
        }
        let spec64 = spec.cast::<f64>();
        let ar = spec64.ar_polynomial();
        let ma = spec64.ma_polynomial();
        let terms = poles
            .iter()
            .map(|p| {
                let lam = p.frequency;
                let e = p.local_memory();
                let mut d_sq = if p.harmonic.is_edge() {
                    1.0
                } else {
                    (2.0 * lam.sin()).abs().powf(-2.0 * e)
                };
                for q in poles.iter().filter(|q| q.harmonic != p.harmonic) {
                    d_sq *= (2.0 * (lam.cos() - q.frequency.cos())).abs().powf(-2.0 * q.exponent);
                }
                let transfer = transfer_modulus_sq(&ma, lam) / transfer_modulus_sq(&ar, lam);
                let base = spec64.sigma2 / std::f64::consts::PI
                    * transfer
                    * gamma(1.0 - 2.0 * e)
                    * (std::f64::consts::PI * e).sin()
                    * d_sq;
                let amplitude = if p.harmonic.is_edge() { base } else { 2.0 * base };
                AcvfTerm {
                    frequency: T::lit(lam),
                    memory: T::lit(e),
                    amplitude: T::lit(amplitude),
                }
            })
            .collect();
        Ok(Self { terms })
    }

    pub fn at(&self, h: i64) -> Result<T> {
        if h == 0 {
            return Err(Error::InvalidArgument(
                "asymptotic autocovariance is not defined at lag 0".into(),
            ));
        }
        let ha = T::lit(h.unsigned_abs() as f64);
        Ok(self
            .terms
            .iter()
            .map(|t| t.amplitude * ha.powf(T::lit(2.0) * t.memory - T::one()) * (ha * t.frequency).cos())
            .sum())
    }
}

pub fn asymptotic_acvf<T: Real>(spec: &SarfimaSpec<T>, h: i64) -> Result<T> {
    AsymptoticAcvf::new(spec)?.at(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ln_gamma_signed;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn white_noise_is_flat() {
        let spec = SarfimaSpec::new(&[(4, 0.0)], 1.0);
        for &l in &[0.0, 0.3, PI / 2.0, PI] {
            assert_relative_eq!(spectral_density(&spec, l).unwrap().value(), 1.0 / (2.0 * PI));
        }
    }

    #[test]
    fn pole_and_regular_points() {
        let spec = SarfimaSpec::new(&[(4, 0.3)], 1.0);
        assert!(spectral_density(&spec, PI / 2.0).unwrap().is_pole());
        assert!(spectral_density(&spec, 0.0).unwrap().is_pole());
        let v = spectral_density(&spec, PI / 4.0).unwrap().value();
        assert_relative_eq!(v, 2f64.powf(-0.6) / (2.0 * PI), max_relative = 1e-14);
    }

    #[test]
    fn negative_memory_vanishes_at_harmonic() {
        let spec = SarfimaSpec::new(&[(4, -0.3)], 1.0);
        assert_eq!(spectral_density(&spec, PI / 2.0).unwrap(), SpectralValue::Finite(0.0));
    }

    #[test]
    fn non_stationary_is_rejected() {
        let spec = SarfimaSpec::new(&[(4, 0.3), (12, 0.3)], 1.0);
        assert!(matches!(spectral_density(&spec, 0.1), Err(Error::NonStationary(_))));
    }

    #[test]
    fn near_matches_plain_evaluation() {
        let spec = SarfimaSpec::new(&[(4, 0.1), (12, 0.3)], 1.0).with_ar(1, vec![0.4]);
        let f = SpectralDensity::new(&spec).unwrap();
        for &(num, den, off) in &[(1, 4, 1e-3), (1, 6, -2e-3), (0, 1, 0.01), (1, 2, -0.02), (1, 12, 0.05)] {
            let h = Harmonic::new(num, den);
            let lam = h.frequency::<f64>() + off;
            assert_relative_eq!(f.near(h, off), f.at(lam).value(), max_relative = 1e-9);
        }
        // Far below rounding level of lambda itself.
        let tiny = f.near(Harmonic::new(1, 4), 1e-30);
        assert!(tiny.is_finite() && tiny > 1e10);
    }

    // ARFIMA(0, d, 0) autocovariance in closed form.
    fn arfima_acvf(d: f64, h: usize) -> f64 {
        let lg = |x: f64| ln_gamma_signed(x).0;
        (lg(1.0 - 2.0 * d) + lg(h as f64 + d) - lg(d) - lg(1.0 - d) - lg(h as f64 + 1.0 - d)).exp()
    }

    #[test]
    fn asymptotic_acvf_matches_arfima_tail() {
        let spec = SarfimaSpec::new(&[(1, 0.3)], 1.0);
        let acvf = AsymptoticAcvf::new(&spec).unwrap();
        let ratio = acvf.at(500).unwrap() / arfima_acvf(0.3, 500);
        assert!((ratio - 1.0).abs() < 0.02, "ratio {ratio}");
    }

    #[test]
    fn asymptotic_acvf_is_even_and_seasonal() {
        let acvf = AsymptoticAcvf::new(&SarfimaSpec::new(&[(4, 0.3_f64)], 1.0)).unwrap();
        for h in 1..50 {
            assert_eq!(acvf.at(h).unwrap(), acvf.at(-h).unwrap());
        }
        // (1 - B^4)^{-d} noise only correlates at multiples of 4, and there it
        // is ARFIMA(0, d, 0) at lag h / 4.
        let at400 = acvf.at(400).unwrap();
        assert!(acvf.at(401).unwrap().abs() < 1e-12 * at400);
        assert!(acvf.at(402).unwrap().abs() < 1e-12 * at400);
        assert!((at400 / arfima_acvf(0.3, 100) - 1.0).abs() < 0.02);
        assert!(acvf.at(0).is_err());
    }

    #[test]
    fn asymptotic_acvf_needs_positive_memory() {
        let spec = SarfimaSpec::new(&[(1, -0.2)], 1.0);
        assert!(AsymptoticAcvf::new(&spec).is_err());
    }
}
