use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::gph::{gph_estimate, gph_single, log_sine_regressor, Method};
use crate::estimators::simplex::{nelder_mead, SimplexOptions};
use crate::model::{roots_outside_unit_circle, LagPolynomial, SarfimaSpec};
use crate::scalar::Real;
use crate::spectrum::{build_band_plan, periodogram, power_bandwidth, Periodogram};

pub const MIN_WHITTLE_LEN: usize = 64;

/// Which parameters of a [`WhittleTemplate`] are estimated. Fixed parameters
/// keep the template values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeParameters {
    pub d: bool,
    pub ar: bool,
    pub ma: bool,
    pub sigma2: bool,
}

impl Default for FreeParameters {
    fn default() -> Self {
        Self {
            d: true,
            ar: true,
            ma: true,
            sigma2: true,
        }
    }
}

/// Model structure to fit. The lags and coefficient counts of the AR and MA
/// factors define the short-memory part; their values are starting points
/// for free coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Deserialize<'de>"))]
pub struct WhittleTemplate<T> {
    pub spec: SarfimaSpec<T>,
    #[serde(default)]
    pub free: FreeParameters,
}

impl<T: Real> WhittleTemplate<T> {
    pub fn new(spec: SarfimaSpec<T>) -> Self {
        Self {
            spec,
            free: FreeParameters::default(),
        }
    }

    /// Template with memory at `periods` and no ARMA part.
    pub fn pure(periods: &[usize]) -> Self {
        let comps: Vec<(usize, T)> = periods.iter().map(|&s| (s, T::zero())).collect();
        Self::new(SarfimaSpec::new(&comps, T::one()))
    }

    pub fn with_ar(mut self, lag: usize, order: usize) -> Self {
        self.spec = self.spec.with_ar(lag, vec![T::zero(); order]);
        self
    }

    pub fn with_ma(mut self, lag: usize, order: usize) -> Self {
        self.spec = self.spec.with_ma(lag, vec![T::zero(); order]);
        self
    }

    /// Names of the free parameters in optimisation order: `d1, d2`, then
    /// `phi{lag}` (`phi{lag}_{k}` for higher orders), then `theta{lag}`.
    pub fn parameter_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.free.d {
            out.extend((1..=self.spec.components.len()).map(|i| format!("d{i}")));
        }
        if self.free.ar {
            out.extend(coefficient_names("phi", &self.spec.ar));
        }
        if self.free.ma {
            out.extend(coefficient_names("theta", &self.spec.ma));
        }
        out
    }
}

fn coefficient_names<T>(prefix: &str, factors: &[LagPolynomial<T>]) -> Vec<String> {
    let mut out = Vec::new();
    for f in factors {
        for k in 1..=f.coeffs.len() {
            if f.coeffs.len() == 1 {
                out.push(format!("{prefix}{}", f.lag));
            } else {
                out.push(format!("{prefix}{}_{k}", f.lag));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct WhittleOptions {
    pub simplex: SimplexOptions,
    /// Open interval for every memory parameter, enforced by a logistic map.
    pub d_bounds: (f64, f64),
    /// Starting memories; by default the log-periodogram estimate with
    /// `m = n^start_alpha`, or zero when that is unavailable.
    pub start_d: Option<Vec<f64>>,
    pub start_alpha: f64,
    pub compute_cov: bool,
}

impl Default for WhittleOptions {
    fn default() -> Self {
        Self {
            simplex: SimplexOptions::default(),
            d_bounds: (-0.99, 1.49),
            start_d: None,
            start_alpha: 0.5,
            compute_cov: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WhittleFit<T> {
    pub method: Method,
    pub d_hat: Vec<T>,
    /// Asymptotic covariance of the free parameters (see `parameters`), empty
    /// when not computed.
    pub cov: Vec<Vec<T>>,
    pub converged: bool,
    pub objective: T,
    pub iterations: usize,
    pub evaluations: usize,
    pub parameters: Vec<String>,
    pub estimates: Vec<T>,
    pub periods: Vec<usize>,
    pub ar: Vec<LagPolynomial<T>>,
    pub ma: Vec<LagPolynomial<T>>,
    pub sigma2: T,
    pub excluded: Vec<usize>,
}

impl<T: Real> WhittleFit<T> {
    pub fn spec(&self) -> SarfimaSpec<T> {
        SarfimaSpec {
            components: self
                .periods
                .iter()
                .zip(&self.d_hat)
                .map(|(&period, &d)| crate::model::SeasonalComponent { period, d })
                .collect(),
            ar: self.ar.clone(),
            ma: self.ma.clone(),
            sigma2: self.sigma2,
        }
    }
}

/// The Whittle criterion
/// `L = 1/(2n) sum_j [ln f(lambda_j) + I(lambda_j) / f(lambda_j)]`
/// over Fourier frequencies `j = 1..n-1` away from the poles, with `sigma2`
/// concentrated out: `L = 1/(2n) [N ln s2 + sum ln g_j + N]`,
/// `s2 = mean(I_j / g_j)` for the unit-variance shape `g`.
#[derive(Debug, Clone)]
pub struct WhittleObjective {
    n: usize,
    indices: Vec<usize>,
    excluded: Vec<usize>,
    ordinates: Vec<f64>,
    cos_sin: Vec<(f64, f64)>,
    /// `log_sine[i][k] = -2 ln |2 sin(s_i lambda_k / 2)|`
    log_sine: Vec<Vec<f64>>,
    periods: Vec<usize>,
}

impl WhittleObjective {
    pub fn new<T: Real>(pgram: &Periodogram<T>, periods: &[usize]) -> Result<Self> {
        let n = pgram.n;
        if n < MIN_WHITTLE_LEN {
            return Err(Error::TooShort {
                needed: MIN_WHITTLE_LEN,
                got: n,
            });
        }
        let mut indices = Vec::new();
        let mut excluded = Vec::new();
        for j in 1..n {
            // |lambda_j - 2 pi k / s| < pi / n  <=>  |j s - k n| < s / 2
            let near_pole = periods.iter().any(|&s| {
                let r = (j * s) % n;
                2 * r.min(n - r) < s
            });
            if near_pole {
                excluded.push(j);
            } else {
                indices.push(j);
            }
        }
        let tau = std::f64::consts::TAU;
        Ok(Self {
            n,
            ordinates: indices.iter().map(|&j| pgram.ordinate(j).f64()).collect(),
            cos_sin: indices
                .iter()
                .map(|&j| {
                    let (s, c) = (tau * j as f64 / n as f64).sin_cos();
                    (c, s)
                })
                .collect(),
            log_sine: periods
                .iter()
                .map(|&s| indices.iter().map(|&j| log_sine_regressor(s, j, n)).collect())
                .collect(),
            periods: periods.to_vec(),
            indices,
            excluded,
        })
    }

    pub fn used_indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn excluded_indices(&self) -> &[usize] {
        &self.excluded
    }

    /// `ln g_j` for every used frequency, `g` the spectral density with unit
    /// innovation variance. `None` if the model is not admissible.
    fn log_shape(&self, spec: &SarfimaSpec<f64>) -> Option<Vec<f64>> {
        if spec.ar.iter().any(|p| !roots_outside_unit_circle(&p.coeffs))
            || spec.ma.iter().any(|p| !roots_outside_unit_circle(&p.coeffs))
        {
            return None;
        }
        let ar = spec.ar_polynomial();
        let ma = spec.ma_polynomial();
        let d = spec.memories();
        let ln_tau = std::f64::consts::TAU.ln();
        Some(
            (0..self.indices.len())
                .map(|k| {
                    let (c, s) = self.cos_sin[k];
                    let mut v = (modulus_sq(&ma, c, s) / modulus_sq(&ar, c, s)).ln() - ln_tau;
                    for (i, &di) in d.iter().enumerate() {
                        v += di * self.log_sine[i][k];
                    }
                    v
                })
                .collect(),
        )
    }

    /// Concentrated criterion and the profiled innovation variance.
    pub fn profiled(&self, spec: &SarfimaSpec<f64>) -> (f64, f64) {
        let Some(lg) = self.log_shape(spec) else {
            return (f64::INFINITY, f64::NAN);
        };
        let nn = lg.len() as f64;
        let s2 = self
            .ordinates
            .iter()
            .zip(&lg)
            .map(|(i, l)| i * (-l).exp())
            .sum::<f64>()
            / nn;
        let value = (nn * s2.ln() + lg.iter().sum::<f64>() + nn) / (2.0 * self.n as f64);
        (value, s2)
    }

    /// Criterion at a fixed innovation variance.
    pub fn fixed(&self, spec: &SarfimaSpec<f64>) -> f64 {
        let Some(lg) = self.log_shape(spec) else {
            return f64::INFINITY;
        };
        let ls = spec.sigma2.ln();
        let total: f64 = self
            .ordinates
            .iter()
            .zip(&lg)
            .map(|(i, l)| l + ls + i * (-(l + ls)).exp())
            .sum();
        total / (2.0 * self.n as f64)
    }

    pub fn periods(&self) -> &[usize] {
        &self.periods
    }
}

fn modulus_sq(p: &[f64], c: f64, s: f64) -> f64 {
    if p.len() == 1 {
        return p[0] * p[0];
    }
    let (mut re, mut im) = (0.0, 0.0);
    for &coef in p.iter().rev() {
        let nr = re * c + im * s + coef;
        let ni = im * c - re * s;
        re = nr;
        im = ni;
    }
    re * re + im * im
}

/// Fits the template to `series` by minimising the Whittle criterion.
///
/// Non-convergence is not an error: the returned fit has `converged = false`.
pub fn whittle_estimate<T: Real>(
    series: &[T],
    template: &WhittleTemplate<T>,
    opts: &WhittleOptions,
) -> Result<WhittleFit<T>> {
    if series.len() < MIN_WHITTLE_LEN {
        return Err(Error::TooShort {
            needed: MIN_WHITTLE_LEN,
            got: series.len(),
        });
    }
    let pgram = periodogram(series, true)?;
    whittle_from_periodogram(&pgram, template, opts)
}

pub fn whittle_from_periodogram<T: Real>(
    pgram: &Periodogram<T>,
    template: &WhittleTemplate<T>,
    opts: &WhittleOptions,
) -> Result<WhittleFit<T>> {
    template.spec.validate()?;
    let base = template.spec.cast::<f64>();
    let free = template.free;
    let periods = base.periods();
    let (lo, hi) = opts.d_bounds;
    if !(lo < hi) {
        return Err(Error::InvalidArgument(format!("empty memory bounds ({lo}, {hi})")));
    }
    let objective = WhittleObjective::new(pgram, &periods)?;

    let start_d = match &opts.start_d {
        Some(d) if d.len() == periods.len() => d.clone(),
        Some(d) => {
            return Err(Error::InvalidArgument(format!(
                "{} starting memories for {} periods",
                d.len(),
                periods.len()
            )))
        }
        None if free.d => gph_start(pgram, &periods, opts.start_alpha),
        None => base.memories(),
    };
    for &d in &base.memories() {
        if !free.d && !(d > lo && d < hi) {
            return Err(Error::InvalidArgument(format!(
                "fixed memory {d} lies outside the bounds ({lo}, {hi})"
            )));
        }
    }
    let margin = 1e-3 * (hi - lo);
    let to_u = |d: f64| {
        let d = d.clamp(lo + margin, hi - margin);
        ((d - lo) / (hi - d)).ln()
    };
    let to_d = |u: f64| lo + (hi - lo) / (1.0 + (-u).exp());

    let mut x0 = Vec::new();
    let mut steps = Vec::new();
    if free.d {
        for &d in &start_d {
            x0.push(to_u(d));
            steps.push(0.3);
        }
    }
    let coeff_start = |factors: &[LagPolynomial<f64>], x0: &mut Vec<f64>, steps: &mut Vec<f64>| {
        for f in factors {
            for &c in &f.coeffs {
                x0.push(c);
                steps.push(0.1);
            }
        }
    };
    if free.ar {
        coeff_start(&base.ar, &mut x0, &mut steps);
    }
    if free.ma {
        coeff_start(&base.ma, &mut x0, &mut steps);
    }

    let build = |x: &[f64]| -> SarfimaSpec<f64> {
        let mut spec = base.clone();
        let mut it = x.iter();
        if free.d {
            for c in &mut spec.components {
                c.d = to_d(*it.next().expect("parameter count"));
            }
        }
        if free.ar {
            for f in &mut spec.ar {
                for c in &mut f.coeffs {
                    *c = *it.next().expect("parameter count");
                }
            }
        }
        if free.ma {
            for f in &mut spec.ma {
                for c in &mut f.coeffs {
                    *c = *it.next().expect("parameter count");
                }
            }
        }
        spec
    };
    let eval = |spec: &SarfimaSpec<f64>| {
        if free.sigma2 {
            objective.profiled(spec).0
        } else {
            objective.fixed(spec)
        }
    };
    if !eval(&build(&x0)).is_finite() {
        return Err(Error::InvalidArgument(
            "template starting point is not stationary and invertible".into(),
        ));
    }
    let result = nelder_mead(|x| eval(&build(x)), &x0, &steps, &opts.simplex);
    let fitted = build(&result.x);
    let sigma2 = if free.sigma2 {
        objective.profiled(&fitted).1
    } else {
        fitted.sigma2
    };
    let natural = natural_parameters(&fitted, free);
    let cov = if opts.compute_cov && !natural.is_empty() {
        whittle_cov(&objective, &fitted, free, pgram.n).unwrap_or_default()
    } else {
        Vec::new()
    };
    let lit = |v: f64| T::lit(v);
    let cast_factors = |fs: &[LagPolynomial<f64>]| -> Vec<LagPolynomial<T>> {
        fs.iter()
            .map(|f| LagPolynomial::new(f.lag, f.coeffs.iter().map(|&c| lit(c)).collect()))
            .collect()
    };
    Ok(WhittleFit {
        method: Method::Whittle,
        d_hat: fitted.memories().into_iter().map(lit).collect(),
        cov: cov
            .iter()
            .map(|r| r.iter().map(|&v| lit(v)).collect())
            .collect(),
        converged: result.converged,
        objective: lit(result.f),
        iterations: result.iterations,
        evaluations: result.evaluations,
        parameters: template.parameter_names(),
        estimates: natural.into_iter().map(lit).collect(),
        periods,
        ar: cast_factors(&fitted.ar),
        ma: cast_factors(&fitted.ma),
        sigma2: lit(sigma2),
        excluded: objective.excluded_indices().to_vec(),
    })
}

fn natural_parameters(spec: &SarfimaSpec<f64>, free: FreeParameters) -> Vec<f64> {
    let mut out = Vec::new();
    if free.d {
        out.extend(spec.memories());
    }
    if free.ar {
        out.extend(spec.ar.iter().flat_map(|f| f.coeffs.iter().copied()));
    }
    if free.ma {
        out.extend(spec.ma.iter().flat_map(|f| f.coeffs.iter().copied()));
    }
    out
}

fn gph_start<T: Real>(pgram: &Periodogram<T>, periods: &[usize], alpha: f64) -> Vec<f64> {
    let m = power_bandwidth(pgram.n, alpha);
    let est = match *periods {
        [s] => gph_single(pgram, s, m).ok(),
        [s1, s2] => build_band_plan(pgram.n, s1, s2, m)
            .and_then(|plan| gph_estimate(pgram, &plan, s1, s2))
            .ok(),
        _ => None,
    };
    match est {
        Some(e) if e.d_hat.iter().all(|d| d.is_finite()) => e.d_hat.iter().map(|d| d.f64()).collect(),
        _ => vec![0.0; periods.len()],
    }
}

/// `W^{-1} / n` with `W = 1/(4 pi) int grad ln f grad ln f'`, discretised over
/// the same frequencies as the criterion and with centred gradients (the
/// innovation variance is concentrated out).
fn whittle_cov(
    objective: &WhittleObjective,
    spec: &SarfimaSpec<f64>,
    free: FreeParameters,
    n: usize,
) -> Option<Vec<Vec<f64>>> {
    let theta = natural_parameters(spec, free);
    let p = theta.len();
    let set = |values: &[f64]| -> Option<SarfimaSpec<f64>> {
        let mut s = spec.clone();
        let mut it = values.iter();
        if free.d {
            for c in &mut s.components {
                c.d = *it.next()?;
            }
        }
        if free.ar {
            for f in &mut s.ar {
                for c in &mut f.coeffs {
                    *c = *it.next()?;
                }
            }
        }
        if free.ma {
            for f in &mut s.ma {
                for c in &mut f.coeffs {
                    *c = *it.next()?;
                }
            }
        }
        Some(s)
    };
    let h = 1e-5;
    let mut grads = Vec::with_capacity(p);
    for i in 0..p {
        let mut up = theta.clone();
        let mut dn = theta.clone();
        up[i] += h;
        dn[i] -= h;
        let a = objective.log_shape(&set(&up)?)?;
        let b = objective.log_shape(&set(&dn)?)?;
        let g: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (x - y) / (2.0 * h)).collect();
        let mean = g.iter().sum::<f64>() / g.len() as f64;
        grads.push(g.into_iter().map(|v| v - mean).collect::<Vec<f64>>());
    }
    let count = grads[0].len() as f64;
    let w: Vec<Vec<f64>> = (0..p)
        .map(|a| {
            (0..p)
                .map(|b| {
                    grads[a].iter().zip(&grads[b]).map(|(x, y)| x * y).sum::<f64>() / (2.0 * count)
                })
                .collect()
        })
        .collect();
    let inv = invert(&w)?;
    Some(
        inv.into_iter()
            .map(|r| r.into_iter().map(|v| v / n as f64).collect())
            .collect(),
    )
}

/// Gauss-Jordan inverse with partial pivoting.
fn invert(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let p = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..p).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for col in 0..p {
        let piv = (col..p).max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        let d = m[col][col];
        for v in &mut m[col] {
            *v /= d;
        }
        for r in 0..p {
            if r != col {
                let f = m[r][col];
                if f != 0.0 {
                    for c in 0..2 * p {
                        m[r][c] -= f * m[col][c];
                    }
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[p..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pole_exclusion_uses_half_spacing() {
        let p = Periodogram {
            n: 100,
            ordinates: vec![1.0_f64; 99],
        };
        let obj = WhittleObjective::new(&p, &[4]).unwrap();
        assert_eq!(obj.excluded_indices(), &[25, 50, 75]);
        let obj = WhittleObjective::new(&p, &[3]).unwrap();
        // 100/3 and 200/3 are not on the grid; 33 and 67 are within half a spacing.
        assert_eq!(obj.excluded_indices(), &[33, 67]);
        let obj = WhittleObjective::new(&p, &[1, 12]).unwrap();
        assert_eq!(obj.excluded_indices(), &[8, 17, 25, 33, 42, 50, 58, 67, 75, 83, 92]);
    }

    #[test]
    fn profiled_variance_matches_flat_spectrum() {
        let n = 128;
        let p = Periodogram {
            n,
            ordinates: vec![3.0 / std::f64::consts::TAU; n - 1],
        };
        let obj = WhittleObjective::new(&p, &[1]).unwrap();
        let (v, s2) = obj.profiled(&SarfimaSpec::new(&[(1, 0.0)], 1.0));
        assert!((s2 - 3.0).abs() < 1e-12);
        let fixed = obj.fixed(&SarfimaSpec::new(&[(1, 0.0)], 3.0));
        assert!((v - fixed).abs() < 1e-12);
    }

    #[test]
    fn non_stationary_ar_is_rejected_by_the_criterion() {
        let p = Periodogram {
            n: 128,
            ordinates: vec![1.0_f64; 127],
        };
        let obj = WhittleObjective::new(&p, &[4]).unwrap();
        let spec = SarfimaSpec::new(&[(4, 0.1)], 1.0).with_ar(1, vec![1.2]);
        assert!(obj.profiled(&spec).0.is_infinite());
    }

    #[test]
    fn parameter_names() {
        let t = WhittleTemplate::<f64>::pure(&[1, 4]).with_ar(4, 1).with_ma(1, 2);
        assert_eq!(t.parameter_names(), ["d1", "d2", "phi4", "theta1_1", "theta1_2"]);
    }

    #[test]
    fn recovers_memory_of_an_exact_spectrum() {
        // Feeding the true density as the periodogram puts the minimum at the truth.
        let n = 1024;
        let spec = SarfimaSpec::new(&[(4, 0.3_f64)], 2.0);
        let dens = crate::model::SpectralDensity::new(&spec).unwrap();
        let ord: Vec<f64> = (1..n)
            .map(|j| dens.at(std::f64::consts::TAU * j as f64 / n as f64).value())
            .map(|v| if v.is_finite() { v } else { 1.0 })
            .collect();
        let p = Periodogram { n, ordinates: ord };
        let fit = whittle_from_periodogram(&p, &WhittleTemplate::pure(&[4]), &WhittleOptions::default())
            .unwrap();
        assert!(fit.converged);
        assert!((fit.d_hat[0] - 0.3).abs() < 1e-4, "{}", fit.d_hat[0]);
        assert!((fit.sigma2 - 2.0).abs() < 1e-3);
        let se = fit.cov[0][0].sqrt();
        // The information for d tends to pi^2 / 6 whatever the period; the
        // discrete sum misses the mass next to the excluded harmonics.
        let expect = (6.0 / (std::f64::consts::PI.powi(2) * n as f64)).sqrt();
        assert!((se / expect - 1.0).abs() < 0.12, "{se} vs {expect}");
    }
}
