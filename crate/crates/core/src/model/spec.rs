use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// One fractional factor `(1 - B^period)^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeasonalComponent<T> {
    pub period: usize,
    pub d: T,
}

/// A factor `1 - c_1 B^lag - c_2 B^{2 lag} - ...` of the AR or MA operator.
///
/// Both operators use the Box-Jenkins sign convention, so an MA factor with
/// coefficient `theta` at lag 1 is `1 - theta B`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagPolynomial<T> {
    pub lag: usize,
    pub coeffs: Vec<T>,
}

impl<T: Real> LagPolynomial<T> {
    pub fn new(lag: usize, coeffs: Vec<T>) -> Self {
        Self { lag, coeffs }
    }

    /// Dense coefficients of the factor in powers of `B`, starting at `B^0 = 1`.
    pub fn expand(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.coeffs.len() * self.lag + 1];
        out[0] = T::one();
        for (k, &c) in self.coeffs.iter().enumerate() {
            out[(k + 1) * self.lag] = -c;
        }
        out
    }
}

/// Seasonal fractional ARIMA model with one or two fractional factors:
///
/// `Phi(B) (1 - B^{s1})^{d1} (1 - B^{s2})^{d2} X_t = Theta(B) eps_t`,
/// `eps_t ~ N(0, sigma2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Deserialize<'de>"))]
pub struct SarfimaSpec<T> {
    pub components: Vec<SeasonalComponent<T>>,
    #[serde(default)]
    pub ar: Vec<LagPolynomial<T>>,
    #[serde(default)]
    pub ma: Vec<LagPolynomial<T>>,
    pub sigma2: T,
}

/// A single failed stationarity or invertibility condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum Violation {
    /// `|d1 + d2| < 1/2`
    MemorySum { total: f64 },
    /// `|d_i| < 1/2`
    ComponentMemory { period: usize, d: f64 },
    /// AR factor has a root on or inside the unit circle.
    ArRoot { lag: usize },
    /// MA factor has a root on or inside the unit circle.
    MaRoot { lag: usize },
}

impl Violation {
    pub fn name(&self) -> &'static str {
        match self {
            Violation::MemorySum { .. } => "|d1+d2| < 1/2",
            Violation::ComponentMemory { .. } => "|d_i| < 1/2",
            Violation::ArRoot { .. } => "AR roots outside unit circle",
            Violation::MaRoot { .. } => "MA roots outside unit circle",
        }
    }

    fn breaks_stationarity(&self) -> bool {
        !matches!(self, Violation::MaRoot { .. })
    }

    fn breaks_invertibility(&self) -> bool {
        !matches!(self, Violation::ArRoot { .. })
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MemorySum { total } => write!(f, "{} (d1+d2 = {total})", self.name()),
            Violation::ComponentMemory { period, d } => {
                write!(f, "{} (d = {d} at period {period})", self.name())
            }
            Violation::ArRoot { lag } | Violation::MaRoot { lag } => {
                write!(f, "{} (factor at lag {lag})", self.name())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidityReport {
    pub stationary: bool,
    pub invertible: bool,
    pub violations: Vec<Violation>,
}

impl ValidityReport {
    pub fn summary(&self) -> String {
        self.violations
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("; ")
    }
}

impl<T: Real> SarfimaSpec<T> {
    /// Model with the given `(period, d)` factors, no ARMA part and the given
    /// innovation variance.
    pub fn new(components: &[(usize, T)], sigma2: T) -> Self {
        Self {
            components: components
                .iter()
                .map(|&(period, d)| SeasonalComponent { period, d })
                .collect(),
            ar: Vec::new(),
            ma: Vec::new(),
            sigma2,
        }
    }

    pub fn with_ar(mut self, lag: usize, coeffs: Vec<T>) -> Self {
        self.ar.push(LagPolynomial::new(lag, coeffs));
        self
    }

    pub fn with_ma(mut self, lag: usize, coeffs: Vec<T>) -> Self {
        self.ma.push(LagPolynomial::new(lag, coeffs));
        self
    }

    pub fn periods(&self) -> Vec<usize> {
        self.components.iter().map(|c| c.period).collect()
    }

    pub fn memories(&self) -> Vec<T> {
        self.components.iter().map(|c| c.d).collect()
    }

    pub fn max_period(&self) -> usize {
        self.components.iter().map(|c| c.period).max().unwrap_or(1)
    }

    /// Same model with every memory parameter negated.
    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        for c in &mut out.components {
            c.d = -c.d;
        }
        out
    }

    /// Convert the scalar type.
    pub fn cast<U: Real>(&self) -> SarfimaSpec<U> {
        let conv = |x: T| U::lit(x.f64());
        SarfimaSpec {
            components: self
                .components
                .iter()
                .map(|c| SeasonalComponent {
                    period: c.period,
                    d: conv(c.d),
                })
                .collect(),
            ar: self
                .ar
                .iter()
                .map(|p| LagPolynomial::new(p.lag, p.coeffs.iter().map(|&c| conv(c)).collect()))
                .collect(),
            ma: self
                .ma
                .iter()
                .map(|p| LagPolynomial::new(p.lag, p.coeffs.iter().map(|&c| conv(c)).collect()))
                .collect(),
            sigma2: conv(self.sigma2),
        }
    }

    /// Structural checks: one or two components with distinct positive periods,
    /// `d > -1`, positive variance, finite coefficients.
    pub fn validate(&self) -> Result<()> {
        let n = self.components.len();
        if n == 0 || n > 2 {
            return Err(Error::InvalidSpec(format!(
                "expected 1 or 2 fractional components, got {n}"
            )));
        }
        for c in &self.components {
            if c.period == 0 {
                return Err(Error::InvalidSpec("period must be >= 1".into()));
            }
            if !c.d.is_finite() || c.d <= -T::one() {
                return Err(Error::InvalidSpec(format!(
                    "memory parameter must be finite and > -1, got {}",
                    c.d
                )));
            }
        }
        if n == 2 && self.components[0].period == self.components[1].period {
            return Err(Error::InvalidSpec(format!(
                "component periods must be distinct, both are {}",
                self.components[0].period
            )));
        }
        if !self.sigma2.is_finite() || self.sigma2 <= T::zero() {
            return Err(Error::InvalidSpec(format!(
                "innovation variance must be positive, got {}",
                self.sigma2
            )));
        }
        for p in self.ar.iter().chain(&self.ma) {
            if p.lag == 0 {
                return Err(Error::InvalidSpec("ARMA factor lag must be >= 1".into()));
            }
            if p.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFinite("ARMA coefficients".into()));
            }
        }
        Ok(())
    }

    /// Full AR operator `Phi(z)` as dense coefficients, `Phi(0) = 1`.
    pub fn ar_polynomial(&self) -> Vec<T> {
        product(&self.ar)
    }

    /// Full MA operator `Theta(z)` as dense coefficients, `Theta(0) = 1`.
    pub fn ma_polynomial(&self) -> Vec<T> {
        product(&self.ma)
    }

    pub fn has_arma(&self) -> bool {
        self.ar.iter().chain(&self.ma).any(|p| !p.coeffs.is_empty())
    }
}

/// Stationarity and invertibility conditions of the two-factor model.
///
/// Stationary iff `|d1 + d2| < 1/2`, every `|d_i| < 1/2` and the AR roots lie
/// outside the unit circle; invertibility uses the same memory conditions with
/// the MA roots.
pub fn check_stationary_invertible<T: Real>(spec: &SarfimaSpec<T>) -> ValidityReport {
    let half = T::lit(0.5);
    let mut violations = Vec::new();
    let total: T = spec.components.iter().map(|c| c.d).sum();
    if spec.components.len() > 1 && total.abs() >= half {
        violations.push(Violation::MemorySum { total: total.f64() });
    }
    for c in &spec.components {
        if c.d.abs() >= half {
            violations.push(Violation::ComponentMemory {
                period: c.period,
                d: c.d.f64(),
            });
        }
    }
    for p in &spec.ar {
        if !roots_outside_unit_circle(&p.coeffs) {
            violations.push(Violation::ArRoot { lag: p.lag });
        }
    }
    for p in &spec.ma {
        if !roots_outside_unit_circle(&p.coeffs) {
            violations.push(Violation::MaRoot { lag: p.lag });
        }
    }
    ValidityReport {
        stationary: !violations.iter().any(Violation::breaks_stationarity),
        invertible: !violations.iter().any(Violation::breaks_invertibility),
        violations,
    }
}

/// Error unless the model is structurally valid and stationary.
pub fn require_stationary<T: Real>(spec: &SarfimaSpec<T>) -> Result<()> {
    spec.validate()?;
    let report = check_stationary_invertible(spec);
    if report.stationary {
        Ok(())
    } else {
        Err(Error::NonStationary(report.summary()))
    }
}

/// Whether `1 - c_1 w - ... - c_p w^p` has all roots strictly outside the unit
/// circle. Runs the step-down (inverse Levinson) recursion; the polynomial is
/// stable iff every reflection coefficient has modulus below one.
pub fn roots_outside_unit_circle<T: Real>(coeffs: &[T]) -> bool {
    let mut a: Vec<T> = coeffs.to_vec();
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    while let Some(&kappa) = a.last() {
        if !(kappa.abs() < T::one()) {
            return false;
        }
        let p = a.len();
        let denom = T::one() - kappa * kappa;
        let prev: Vec<T> = (0..p - 1)
            .map(|k| (a[k] + kappa * a[p - 2 - k]) / denom)
            .collect();
        a = prev;
    }
    true
}

fn product<T: Real>(factors: &[LagPolynomial<T>]) -> Vec<T> {
    factors
        .iter()
        .fold(vec![T::one()], |acc, f| convolve(&acc, &f.expand()))
}

pub(crate) fn convolve<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `|P(e^{-i lambda})|^2` for dense coefficients `p`.
pub(crate) fn transfer_modulus_sq<T: Real>(p: &[T], lambda: T) -> T {
    if p.len() == 1 {
        return p[0] * p[0];
    }
    let (s, c) = lambda.sin_cos();
    // Horner in z = e^{-i lambda}.
    let (mut re, mut im) = (T::zero(), T::zero());
    for &coef in p.iter().rev() {
        let nr = re * c + im * s + coef;
        let ni = im * c - re * s;
        re = nr;
        im = ni;
    }
    re * re + im * im
}
