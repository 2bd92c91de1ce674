#![allow(dead_code)]

use rand::Rng;
use rand_distr::StandardNormal;
use sarfima::scalar::ln_gamma_signed;
use sarfima::simulate::rng_from_seed;
use sarfima::Pgram;

pub fn white_noise(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Noise-free periodogram `c * prod |2 sin(lambda s_i / 2)|^{-2 d_i}`; exact
/// zeros of the sine (harmonics) get ordinate 1.
pub fn log_linear_periodogram(n: usize, c: f64, memories: &[(usize, f64)]) -> Pgram {
    let ordinates = (1..n)
        .map(|j| {
            let mut v = c;
            for &(s, d) in memories {
                if (j * s) % n == 0 {
                    return 1.0;
                }
                let lam = std::f64::consts::TAU * j as f64 / n as f64;
                v *= (2.0 * (lam * s as f64 / 2.0).sin()).abs().powf(-2.0 * d);
            }
            v
        })
        .collect();
    Pgram { n, ordinates }
}

/// ARFIMA(0,d,0) autocovariance
/// `sigma2 Γ(1-2d) Γ(h+d) / (Γ(d) Γ(1-d) Γ(h+1-d))` via log-Gamma with signs.
pub fn arfima_acvf(d: f64, sigma2: f64, h: usize) -> f64 {
    let h = h as f64;
    let terms = [
        (ln_gamma_signed(1.0 - 2.0 * d), 1.0),
        (ln_gamma_signed(h + d), 1.0),
        (ln_gamma_signed(d), -1.0),
        (ln_gamma_signed(1.0 - d), -1.0),
        (ln_gamma_signed(h + 1.0 - d), -1.0),
    ];
    let (mut log, mut sign) = (0.0, 1.0);
    for ((lg, sg), power) in terms {
        log += power * lg;
        sign *= sg;
    }
    sigma2 * sign * log.exp()
}

/// `pi_k = Γ(k - d) / (Γ(k + 1) Γ(-d))`.
pub fn pi_gamma(d: f64, k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let (a, sa) = ln_gamma_signed(k as f64 - d);
    let (b, _) = ln_gamma_signed(k as f64 + 1.0);
    let (c, sc) = ln_gamma_signed(-d);
    sa * sc * (a - b - c).exp()
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

pub fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / x.len() as f64
}

/// Sample autocorrelation at `lag` with the usual `1/n` normalisation.
pub fn sample_acf(x: &[f64], lag: usize) -> f64 {
    let m = mean(x);
    let c0: f64 = x.iter().map(|v| (v - m).powi(2)).sum();
    let ch: f64 = x.iter().zip(&x[lag..]).map(|(a, b)| (a - m) * (b - m)).sum();
    ch / c0
}
