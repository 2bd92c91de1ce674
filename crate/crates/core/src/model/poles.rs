use serde::Serialize;

use crate::model::spec::SarfimaSpec;
use crate::scalar::Real;

/// A seasonal harmonic `lambda = 2 pi num / den` with `0 <= num/den <= 1/2`,
/// held as a reduced fraction so shared frequencies compare exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Harmonic {
    pub num: usize,
    pub den: usize,
}

impl Harmonic {
    pub fn new(num: usize, den: usize) -> Self {
        let g = gcd(num, den);
        Self {
            num: num / g,
            den: den / g,
        }
    }

    pub fn frequency<T: Real>(&self) -> T {
        T::TAU() * T::from_usize_lossy(self.num) / T::from_usize_lossy(self.den)
    }

    /// Frequency 0 or pi.
    pub fn is_edge(&self) -> bool {
        self.num == 0 || 2 * self.num == self.den
    }

    /// Whether this is one of the harmonics `2 pi j / s` of period `s`.
    pub fn belongs_to(&self, period: usize) -> bool {
        (self.num * period).is_multiple_of(self.den)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pole<T> {
    pub harmonic: Harmonic,
    pub frequency: T,
    /// Merged exponent `d_ij`: the sum of owning memories in the interior,
    /// half of it at 0 and pi.
    pub exponent: T,
    pub owners: Vec<usize>,
}

impl<T: Real> Pole<T> {
    /// Power-law index `e` with `f(lambda) ~ |lambda - lambda_p|^{-2e}` near
    /// the pole: the exponent in the interior, twice it at 0 and pi.
    pub fn local_memory(&self) -> T {
        if self.harmonic.is_edge() {
            self.exponent + self.exponent
        } else {
            self.exponent
        }
    }
}

/// All seasonal harmonics of the model on `[0, pi]`, sorted by frequency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoleSet<T> {
    pub entries: Vec<Pole<T>>,
}

impl<T: Real> PoleSet<T> {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Pole<T>> {
        self.entries.iter()
    }

    pub fn find(&self, h: Harmonic) -> Option<&Pole<T>> {
        self.entries.iter().find(|p| p.harmonic == h)
    }
}

/// Frequencies `2 pi j / s_i`, `j = 0..=floor(s_i/2)`, over all components,
/// with shared frequencies merged once.
pub fn enumerate_poles<T: Real>(spec: &SarfimaSpec<T>) -> PoleSet<T> {
    let mut harmonics: Vec<Harmonic> = spec
        .components
        .iter()
        .flat_map(|c| (0..=c.period / 2).map(move |j| Harmonic::new(j, c.period)))
        .collect();
    harmonics.sort_by(|a, b| (a.num * b.den).cmp(&(b.num * a.den)));
    harmonics.dedup();

    let entries = harmonics
        .into_iter()
        .map(|h| {
            let owners: Vec<usize> = spec
                .components
                .iter()
                .filter(|c| h.belongs_to(c.period))
                .map(|c| c.period)
                .collect();
            let total: T = spec
                .components
                .iter()
                .filter(|c| h.belongs_to(c.period))
                .map(|c| c.d)
                .sum();
            let exponent = if h.is_edge() {
                total / T::lit(2.0)
            } else {
                total
            };
            Pole {
                harmonic: h,
                frequency: h.frequency(),
                exponent,
                owners,
            }
        })
        .collect();
    PoleSet { entries }
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn single_period_four() {
        let poles = enumerate_poles(&SarfimaSpec::new(&[(4, 0.3)], 1.0));
        let got: Vec<(f64, f64)> = poles.iter().map(|p| (p.frequency, p.exponent)).collect();
        assert_eq!(got.len(), 3);
        assert_relative_eq!(got[0].0, 0.0);
        assert_relative_eq!(got[0].1, 0.15);
        assert_relative_eq!(got[1].0, PI / 2.0);
        assert_relative_eq!(got[1].1, 0.3);
        assert_relative_eq!(got[2].0, PI);
        assert_relative_eq!(got[2].1, 0.15);
    }

    #[test]
    fn shared_interior_frequency_sums_memories() {
        let poles = enumerate_poles(&SarfimaSpec::new(&[(4, 0.1), (12, 0.3)], 1.0));
        // Harmonics of 12 are j/12 for j = 0..=6; all harmonics of 4 are among them.
        assert_eq!(poles.len(), 7);
        let quarter = poles.find(Harmonic::new(1, 4)).unwrap();
        assert_eq!(quarter.harmonic, Harmonic::new(3, 12));
        assert_relative_eq!(quarter.exponent, 0.4);
        assert_eq!(quarter.owners, vec![4, 12]);
        let zero = poles.find(Harmonic::new(0, 1)).unwrap();
        assert_relative_eq!(zero.exponent, 0.2);
        let pi = poles.find(Harmonic::new(1, 2)).unwrap();
        assert_relative_eq!(pi.exponent, 0.2);
        let sixth = poles.find(Harmonic::new(1, 6)).unwrap();
        assert_relative_eq!(sixth.exponent, 0.3);
    }

    #[test]
    fn zero_memory_gives_zero_exponents() {
        let poles = enumerate_poles(&SarfimaSpec::new(&[(4, 0.0), (12, 0.0)], 1.0));
        assert!(poles.iter().all(|p| p.exponent == 0.0));
    }

    #[test]
    fn odd_period_has_no_pi_harmonic() {
        let poles = enumerate_poles(&SarfimaSpec::new(&[(1, 0.2), (7, 0.2)], 1.0));
        let nums: Vec<Harmonic> = poles.iter().map(|p| p.harmonic).collect();
        assert_eq!(
            nums,
            vec![
                Harmonic::new(0, 1),
                Harmonic::new(1, 7),
                Harmonic::new(2, 7),
                Harmonic::new(3, 7)
            ]
        );
        assert!(poles
            .iter()
            .all(|p| p.frequency < PI && p.frequency >= 0.0));
    }
}
