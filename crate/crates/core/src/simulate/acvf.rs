use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{enumerate_poles, Harmonic, SarfimaSpec, SpectralDensity};

const GL_ORDER: usize = 16;
const GRADING_RATIO: f64 = 0.15;
const GRADING_LEVELS: usize = 40;
const CHUNK: usize = 2048;
const RESEED_EVERY: usize = 128;

/// Autocovariances `gamma(h) = 2 int_0^pi f(lambda) cos(h lambda) d lambda`,
/// `h = 0..=max_lag`.
///
/// `[0, pi]` is split at every seasonal harmonic and covered by about
/// `2^grid_exponent` Gauss-Legendre nodes. Panels next to a pole are refined
/// geometrically towards it and the last sliver is integrated in closed form
/// from the local power law, so no node ever sits on a pole.
pub fn acvf_numeric(spec: &SarfimaSpec<f64>, max_lag: usize, grid_exponent: u32) -> Result<Vec<f64>> {
    let dens = SpectralDensity::new(spec)?;
    if !(4..=30).contains(&grid_exponent) {
        return Err(Error::InvalidArgument(format!(
            "grid exponent must lie in 4..=30, got {grid_exponent}"
        )));
    }
    let nodes = quadrature_nodes(spec, &dens, grid_exponent)?;
    let partials: Vec<Vec<f64>> = nodes
        .par_chunks(CHUNK)
        .map(|chunk| accumulate(chunk, max_lag))
        .collect();
    let mut gamma = vec![0.0; max_lag + 1];
    for p in &partials {
        for (g, v) in gamma.iter_mut().zip(p) {
            *g += v;
        }
    }
    for g in &mut gamma {
        *g *= 2.0;
    }
    if !gamma.iter().all(|g| g.is_finite()) {
        return Err(Error::Quadrature("non-finite autocovariance".into()));
    }
    if !(gamma[0] > 0.0) {
        return Err(Error::Quadrature(format!("variance {} is not positive", gamma[0])));
    }
    if let Some(h) = (1..=max_lag).find(|&h| gamma[h].abs() > gamma[0]) {
        return Err(Error::Quadrature(format!(
            "|gamma({h})| = {} exceeds gamma(0) = {}",
            gamma[h].abs(),
            gamma[0]
        )));
    }
    Ok(gamma)
}

/// Largest change of `gamma(0..=max_lag)`, relative to `gamma(0)`, when the
/// grid is doubled. Fails if it reaches `1e-6`.
pub fn check_quadrature(spec: &SarfimaSpec<f64>, grid_exponent: u32, max_lag: usize) -> Result<f64> {
    let a = acvf_numeric(spec, max_lag, grid_exponent)?;
    let b = acvf_numeric(spec, max_lag, grid_exponent + 1)?;
    let change = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
        / b[0];
    if change < 1e-6 {
        Ok(change)
    } else {
        Err(Error::Quadrature(format!(
            "doubling the grid changed the autocovariances by {change:.3e}"
        )))
    }
}

/// `(lambda, weight * f)` pairs.
type Node = (f64, f64);

fn accumulate(nodes: &[Node], max_lag: usize) -> Vec<f64> {
    let mut out = vec![0.0; max_lag + 1];
    for &(lam, wf) in nodes {
        let (s1, c1) = lam.sin_cos();
        let (mut c, mut s) = (1.0, 0.0);
        for (h, o) in out.iter_mut().enumerate() {
            if h % RESEED_EVERY == 0 && h > 0 {
                let (sv, cv) = (h as f64 * lam).sin_cos();
                c = cv;
                s = sv;
            }
            *o += wf * c;
            let nc = c * c1 - s * s1;
            s = s * c1 + c * s1;
            c = nc;
        }
    }
    out
}

struct Breakpoint {
    harmonic: Harmonic,
    /// Local power-law index `e` with `f ~ |lambda - lambda_p|^{-2e}`; zero
    /// when the density is smooth there.
    memory: f64,
}

fn quadrature_nodes(spec: &SarfimaSpec<f64>, dens: &SpectralDensity<f64>, g: u32) -> Result<Vec<Node>> {
    let poles = enumerate_poles(spec);
    let mut points: Vec<Breakpoint> = poles
        .iter()
        .map(|p| Breakpoint {
            harmonic: p.harmonic,
            memory: p.local_memory(),
        })
        .collect();
    for h in [Harmonic::new(0, 1), Harmonic::new(1, 2)] {
        if !points.iter().any(|b| b.harmonic == h) {
            points.push(Breakpoint { harmonic: h, memory: 0.0 });
        }
    }
    points.sort_by(|a, b| (a.harmonic.num * b.harmonic.den).cmp(&(b.harmonic.num * a.harmonic.den)));
    if let Some(b) = points.iter().find(|b| b.memory >= 0.5) {
        return Err(Error::Quadrature(format!(
            "density is not integrable at the harmonic {}/{}",
            b.harmonic.num, b.harmonic.den
        )));
    }
    let (gl_x, gl_w) = gauss_legendre(GL_ORDER);
    let panels_total = ((1usize << g) / GL_ORDER).max(1) as f64;
    let mut nodes = Vec::new();
    // Nodes are generated as offsets from a harmonic so that offsets much
    // smaller than the harmonic's frequency keep full precision.
    let mut emit = |anchor: &Breakpoint, lo: f64, hi: f64, nodes: &mut Vec<Node>| {
        let base = anchor.harmonic.frequency::<f64>();
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (x, w) in gl_x.iter().zip(&gl_w) {
            let off = mid + half * x;
            nodes.push((base + off, w * half * dens.near(anchor.harmonic, off)));
        }
    };
    for pair in points.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let la = a.harmonic.frequency::<f64>();
        let lb = b.harmonic.frequency::<f64>();
        let len = lb - la;
        let singular_a = a.memory != 0.0;
        let singular_b = b.memory != 0.0;
        let mut count = ((len / std::f64::consts::PI) * panels_total).round().max(1.0) as usize;
        if count == 1 && singular_a && singular_b {
            count = 2;
        }
        let w = len / count as f64;
        for k in 0..count {
            // Offsets of the panel measured from `a` (first half of the
            // segment) or from `b` (second half, negative).
            let from_a = 2 * k < count;
            let (anchor, lo, hi) = if from_a {
                (a, k as f64 * w, (k + 1) as f64 * w)
            } else {
                (b, -((count - k) as f64) * w, -((count - k - 1) as f64) * w)
            };
            if k == 0 && singular_a {
                graded(a, w, 1.0, &mut emit, &mut nodes, dens);
            } else if k + 1 == count && singular_b {
                graded(b, w, -1.0, &mut emit, &mut nodes, dens);
            } else {
                emit(anchor, lo, hi, &mut nodes);
            }
        }
    }
    Ok(nodes)
}

/// Panel of width `w` next to the pole `p`, on the side `dir` (+1 right, -1 left).
fn graded(
    p: &Breakpoint,
    w: f64,
    dir: f64,
    emit: &mut impl FnMut(&Breakpoint, f64, f64, &mut Vec<Node>),
    nodes: &mut Vec<Node>,
    dens: &SpectralDensity<f64>,
) {
    let mut outer = w;
    for _ in 0..GRADING_LEVELS {
        let inner = outer * GRADING_RATIO;
        if dir > 0.0 {
            emit(p, inner, outer, nodes);
        } else {
            emit(p, -outer, -inner, nodes);
        }
        outer = inner;
    }
    // int_0^eps C t^{-2e} dt = f(eps) eps / (1 - 2e)
    let eps = outer;
    let f_eps = dens.near(p.harmonic, dir * eps);
    nodes.push((p.harmonic.frequency::<f64>(), f_eps * eps / (1.0 - 2.0 * p.memory)));
}

/// Nodes and weights of the `order`-point Gauss-Legendre rule on `[-1, 1]`.
fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; order];
    let mut w = vec![0.0; order];
    for i in 0..order.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=order {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = order as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[order - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[order - 1 - i] = w[i];
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ln_gamma_signed;

    fn arfima(d: f64, h: usize) -> f64 {
        let h = h as f64;
        let parts = [
            (ln_gamma_signed(1.0 - 2.0 * d), 1.0),
            (ln_gamma_signed(h + d), 1.0),
            (ln_gamma_signed(d), -1.0),
            (ln_gamma_signed(1.0 - d), -1.0),
            (ln_gamma_signed(h + 1.0 - d), -1.0),
        ];
        let (mut l, mut sign) = (0.0, 1.0);
        for ((lg, sg), e) in parts {
            l += e * lg;
            sign *= sg;
        }
        sign * l.exp()
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(16);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let m30: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((m30 - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn white_noise() {
        let g = acvf_numeric(&SarfimaSpec::new(&[(1, 0.0)], 1.0), 40, 12).unwrap();
        assert!((g[0] - 1.0).abs() < 1e-8);
        assert!(g[1..].iter().all(|v| v.abs() < 1e-8));
    }

    #[test]
    fn ar1() {
        let spec = SarfimaSpec::new(&[(1, 0.0)], 1.0).with_ar(1, vec![0.5]);
        let g = acvf_numeric(&spec, 30, 12).unwrap();
        for (h, v) in g.iter().enumerate() {
            let exact = 0.5f64.powi(h as i32) / 0.75;
            assert!((v - exact).abs() < 1e-8, "h={h}");
        }
    }

    #[test]
    fn fractional_noise_matches_closed_form() {
        for &d in &[0.3, 0.45, -0.3] {
            let g = acvf_numeric(&SarfimaSpec::new(&[(1, d)], 1.0), 100, 14).unwrap();
            for h in 0..=100 {
                let exact = arfima(d, h);
                assert!((g[h] / exact - 1.0).abs() < 1e-6, "d={d} h={h}: {} vs {exact}", g[h]);
            }
        }
    }

    #[test]
    fn seasonal_noise_is_dilated_fractional_noise() {
        let g = acvf_numeric(&SarfimaSpec::new(&[(4, 0.3)], 1.0), 80, 14).unwrap();
        for h in 0..=80 {
            let exact = if h % 4 == 0 { arfima(0.3, h / 4) } else { 0.0 };
            assert!((g[h] - exact).abs() < 1e-7, "h={h}: {} vs {exact}", g[h]);
        }
    }

    #[test]
    fn grid_doubling_is_stable() {
        let spec = SarfimaSpec::new(&[(4, 0.1), (12, 0.3)], 1.0);
        assert!(check_quadrature(&spec, 13, 50).unwrap() < 1e-6);
    }

    #[test]
    fn rejects_non_stationary() {
        assert!(acvf_numeric(&SarfimaSpec::new(&[(4, 0.5)], 1.0), 10, 12).is_err());
    }
}
