use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// One band of Fourier ordinates around the seasonal harmonic `2 pi k / s'`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Band<T> {
    /// Harmonic index `k`, `0..=floor(s'/2)`.
    pub harmonic: usize,
    pub center: T,
    /// Fourier index nearest to the center, `round(n k / s')`.
    pub center_index: usize,
    /// Signed offsets `j`; zero is never included.
    pub offsets: Vec<isize>,
    /// 1 for one-sided bands (k = 0 and k = s'/2), 2 otherwise.
    pub delta: usize,
    /// `k` is a harmonic of the smaller period too (k = 0 or k s2 multiple of s').
    pub informative: bool,
}

impl<T> Band<T> {
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.offsets
            .iter()
            .map(move |&j| (self.center_index as isize + j) as usize)
    }
}

/// Frequency bands used by the multi-band log-periodogram regression.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandPlan<T> {
    pub n: usize,
    /// Largest period `s'`.
    pub s_prime: usize,
    /// The smaller period of a two-period plan.
    pub s_small: Option<usize>,
    pub m: usize,
    pub bands: Vec<Band<T>>,
    /// Some center `n k / s'` was not an integer and was rounded to the nearest
    /// Fourier index.
    pub off_grid_centers: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BandPlanOptions {
    /// Accept bandwidths whose bands overlap (the uncapped full-gap bandwidth).
    pub allow_overlap: bool,
}

impl<T: Real> BandPlan<T> {
    /// Plan for a single period `s`.
    pub fn single(n: usize, s: usize, m: usize) -> Result<Self> {
        Self::single_with(n, s, m, BandPlanOptions::default())
    }

    pub fn single_with(n: usize, s: usize, m: usize, opts: BandPlanOptions) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidArgument("period must be >= 1".into()));
        }
        build(n, s, None, m, opts)
    }

    /// Number of regression points, `sum_k delta_k m`.
    pub fn point_count(&self) -> usize {
        self.bands.iter().map(|b| b.offsets.len()).sum()
    }

    pub fn delta_sum(&self) -> usize {
        self.bands.iter().map(|b| b.delta).sum()
    }

    pub fn periods(&self) -> Vec<usize> {
        match self.s_small {
            Some(s) => vec![self.s_prime, s],
            None => vec![self.s_prime],
        }
    }
}

/// Band plan for two periods, one a multiple of the other (in either order).
pub fn build_band_plan<T: Real>(n: usize, s1: usize, s2: usize, m: usize) -> Result<BandPlan<T>> {
    build_band_plan_with(n, s1, s2, m, BandPlanOptions::default())
}

pub fn build_band_plan_with<T: Real>(
    n: usize,
    s1: usize,
    s2: usize,
    m: usize,
    opts: BandPlanOptions,
) -> Result<BandPlan<T>> {
    let (large, small) = ordered_periods(s1, s2)?;
    build(n, large, Some(small), m, opts)
}

/// `(s', smaller)` after checking that the larger period is a multiple of
/// the smaller one and that they differ.
pub fn ordered_periods(s1: usize, s2: usize) -> Result<(usize, usize)> {
    if s1 == 0 || s2 == 0 {
        return Err(Error::InvalidArgument("periods must be >= 1".into()));
    }
    let (large, small) = if s1 >= s2 { (s1, s2) } else { (s2, s1) };
    if large == small {
        return Err(Error::InvalidArgument(format!(
            "the two periods must differ, both are {large}"
        )));
    }
    if large % small != 0 {
        return Err(Error::NotDivisor { larger: large, smaller: small });
    }
    Ok((large, small))
}

fn build<T: Real>(
    n: usize,
    s_prime: usize,
    s_small: Option<usize>,
    m: usize,
    opts: BandPlanOptions,
) -> Result<BandPlan<T>> {
    if m < 2 {
        return Err(Error::BandwidthTooSmall(m));
    }
    if !opts.allow_overlap && 2 * m * s_prime >= n {
        return Err(Error::BandOverlap { m, n, s_prime });
    }
    let half = s_prime / 2;
    let even = s_prime.is_multiple_of(2);
    let mut off_grid = false;
    let mut bands = Vec::with_capacity(half + 1);
    for k in 0..=half {
        if !(n * k).is_multiple_of(s_prime) {
            off_grid = true;
        }
        let center_index = ((2 * n * k + s_prime) / (2 * s_prime)).min(n / 2 + n % 2);
        let mi = m as isize;
        let (offsets, delta): (Vec<isize>, usize) = if k == 0 {
            ((1..=mi).collect(), 1)
        } else if even && k == half {
            ((1..=mi).map(|j| -j).collect(), 1)
        } else {
            ((1..=mi).chain((1..=mi).map(|j| -j)).collect(), 2)
        };
        let informative = k == 0 || s_small.is_some_and(|s| (k * s) % s_prime == 0);
        bands.push(Band {
            harmonic: k,
            center: T::TAU() * T::from_usize_lossy(k) / T::from_usize_lossy(s_prime),
            center_index,
            offsets,
            delta,
            informative,
        });
    }
    let mut seen = vec![false; n + 1];
    for b in &bands {
        for (idx, &j) in b.indices().zip(&b.offsets) {
            let raw = b.center_index as isize + j;
            if raw < 1 || 2 * raw as usize > n {
                return Err(Error::BandOverlap { m, n, s_prime });
            }
            if seen[idx] && !opts.allow_overlap {
                return Err(Error::BandOverlap { m, n, s_prime });
            }
            seen[idx] = true;
        }
    }
    Ok(BandPlan {
        n,
        s_prime,
        s_small,
        m,
        bands,
        off_grid_centers: off_grid,
    })
}

/// Full-gap bandwidth `floor((n-1)/s')` capped at `ceil(n/(2 s')) - 1` so that
/// neighbouring bands stay disjoint.
pub fn gph_t_bandwidth(n: usize, s1: usize, s2: usize) -> usize {
    let s_prime = s1.max(s2).max(1);
    let cap = n.div_ceil(2 * s_prime).saturating_sub(1);
    gph_t_bandwidth_uncapped(n, s1, s2).min(cap)
}

/// `floor((n-1)/s')`: every ordinate between harmonics, with overlapping bands.
pub fn gph_t_bandwidth_uncapped(n: usize, s1: usize, s2: usize) -> usize {
    n.saturating_sub(1) / s1.max(s2).max(1)
}

/// `floor(n^alpha)`.
pub fn power_bandwidth(n: usize, alpha: f64) -> usize {
    // Nudge so that exact powers such as 1024^0.5 do not round down.
    ((n as f64).powf(alpha) * (1.0 + 1e-12)).floor() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offset_sets_per_harmonic() {
        let plan: BandPlan<f64> = build_band_plan(1080, 4, 1, 5).unwrap();
        assert_eq!(plan.bands.len(), 3);
        assert_eq!(plan.bands[0].offsets, vec![1, 2, 3, 4, 5]);
        assert_eq!(plan.bands[2].offsets, vec![-1, -2, -3, -4, -5]);
        assert_eq!(plan.bands[1].offsets, vec![1, 2, 3, 4, 5, -1, -2, -3, -4, -5]);
        assert_eq!(plan.bands[1].center_index, 270);
        assert_eq!(plan.bands[2].center_index, 540);
        assert_eq!(plan.point_count(), plan.delta_sum() * 5);
        assert!(!plan.off_grid_centers);
    }

    #[test]
    fn informative_harmonics() {
        let plan: BandPlan<f64> = build_band_plan(1080, 12, 4, 10).unwrap();
        let inf: Vec<usize> = plan
            .bands
            .iter()
            .filter(|b| b.informative)
            .map(|b| b.harmonic)
            .collect();
        assert_eq!(inf, vec![0, 3, 6]);
        let deltas: Vec<usize> = plan.bands.iter().map(|b| b.delta).collect();
        assert_eq!(deltas, vec![1, 2, 2, 2, 2, 2, 1]);
    }

    #[test]
    fn overlap_guard() {
        assert!(matches!(
            build_band_plan::<f64>(100, 12, 4, 10),
            Err(Error::BandOverlap { .. })
        ));
        assert!(build_band_plan::<f64>(1080, 4, 1, 134).is_ok());
        assert!(build_band_plan::<f64>(1080, 4, 1, 135).is_err());
    }

    #[test]
    fn divisibility_and_size_guards() {
        assert!(matches!(
            build_band_plan::<f64>(1080, 12, 5, 10),
            Err(Error::NotDivisor { larger: 12, smaller: 5 })
        ));
        assert!(matches!(
            build_band_plan::<f64>(1080, 12, 4, 1),
            Err(Error::BandwidthTooSmall(1))
        ));
        assert!(build_band_plan::<f64>(1080, 4, 4, 10).is_err());
    }

    #[test]
    fn full_gap_bandwidths() {
        assert_eq!(gph_t_bandwidth_uncapped(1080, 4, 1), 269);
        assert_eq!(gph_t_bandwidth(1080, 4, 1), 134);
        assert_eq!(gph_t_bandwidth(1080, 12, 4), 44);
        assert_eq!(gph_t_bandwidth(13, 12, 1), 0);
        assert!(build_band_plan::<f64>(13, 12, 1, gph_t_bandwidth(13, 12, 1)).is_err());
    }

    #[test]
    fn uncapped_plan_needs_explicit_opt_in() {
        let m = gph_t_bandwidth_uncapped(1080, 4, 1);
        assert!(build_band_plan::<f64>(1080, 4, 1, m).is_err());
        let opts = BandPlanOptions { allow_overlap: true };
        let plan: BandPlan<f64> = build_band_plan_with(1080, 4, 1, m, opts).unwrap();
        assert_eq!(plan.point_count(), 4 * m);
    }

    #[test]
    fn odd_period_and_off_grid_centers() {
        let plan: BandPlan<f64> = build_band_plan(2037, 7, 1, 20).unwrap();
        assert_eq!(plan.bands.len(), 4);
        assert!(plan.bands.iter().skip(1).all(|b| b.delta == 2));
        assert!(!plan.off_grid_centers);
        let plan: BandPlan<f64> = BandPlan::single(1000, 12, 10).unwrap();
        assert!(plan.off_grid_centers);
        assert_eq!(plan.bands[1].center_index, 83);
    }

    #[test]
    fn power_bandwidth_floors() {
        assert_eq!(power_bandwidth(1080, 0.5), 32);
        assert_eq!(power_bandwidth(1024, 0.5), 32);
        assert_eq!(power_bandwidth(1080, 0.3), 8);
    }
}
