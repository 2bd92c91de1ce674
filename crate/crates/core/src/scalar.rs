//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All model, spectral and estimation code is written against [`Real`], so the
//! same routines run in `f32` or `f64`. Special functions (Gamma) are evaluated
//! in `f64` and converted back; the exact-arithmetic paths (the asymptotic
//! design matrix) use [`num_rational::Ratio`] through [`ExactField`].

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rustfft::FftNum;

/// Floating point scalar usable by every routine in this crate.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + FftNum
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`; every `Real` can represent (a rounding of)
    /// any finite `f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(x: usize) -> Self {
        Self::from_usize(x).expect("usize representable")
    }

    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + FftNum
        + Sum
        + Default
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Field operations needed by the small dense linear algebra below. Implemented
/// by floats and by `Ratio<i64>` for exact checks.
pub trait ExactField:
    Clone + PartialEq + Debug + num_traits::Num + num_traits::Signed + FromPrimitive
{
}

impl<T> ExactField for T where
    T: Clone + PartialEq + Debug + num_traits::Num + num_traits::Signed + FromPrimitive
{
}

/// Natural log of |Γ(x)| together with its sign, for any real `x` off the poles.
pub fn ln_gamma_signed(x: f64) -> (f64, f64) {
    use statrs::function::gamma::ln_gamma;
    if x > 0.0 {
        return (ln_gamma(x), 1.0);
    }
    // Reflection: Γ(x)Γ(1−x) = π / sin(πx).
    let s = (std::f64::consts::PI * x).sin();
    let lg = std::f64::consts::PI.ln() - s.abs().ln() - ln_gamma(1.0 - x);
    (lg, s.signum())
}

/// Γ(x) for real `x` off the non-positive integers.
pub fn gamma(x: f64) -> f64 {
    let (lg, sign) = ln_gamma_signed(x);
    sign * lg.exp()
}

/// Exact 2×2 (or 1×1) inverse. Returns `None` when singular.
pub fn invert_small<F: ExactField>(m: &[Vec<F>]) -> Option<Vec<Vec<F>>> {
    match m.len() {
        1 => {
            if m[0][0].is_zero() {
                None
            } else {
                Some(vec![vec![F::one() / m[0][0].clone()]])
            }
        }
        2 => {
            let (a, b, c, d) = (
                m[0][0].clone(),
                m[0][1].clone(),
                m[1][0].clone(),
                m[1][1].clone(),
            );
            let det = a.clone() * d.clone() - b.clone() * c.clone();
            if det.is_zero() {
                return None;
            }
            Some(vec![
                vec![d / det.clone(), -b / det.clone()],
                vec![-c / det.clone(), a / det],
            ])
        }
        _ => None,
    }
}
