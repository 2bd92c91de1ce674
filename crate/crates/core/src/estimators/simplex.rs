//! Nelder-Mead simplex minimisation.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    pub max_iter: usize,
    /// Stop when `f_max - f_min` falls below this...
    pub f_tol: f64,
    /// ...and every vertex lies within this sup-norm distance of the best one.
    pub x_tol: f64,
    pub restarts: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_iter: 2000,
            f_tol: 1e-9,
            x_tol: 1e-6,
            restarts: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

/// Minimises `f` from `x0` with initial simplex edge lengths `steps`.
///
/// Non-finite objective values are treated as `+inf`, which keeps the search
/// inside any region where `f` is finite. After convergence the search is
/// restarted from the best vertex `opts.restarts` times.
pub fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    steps: &[f64],
    opts: &SimplexOptions,
) -> SimplexResult {
    let mut evals = 0;
    let mut eval = |x: &[f64]| {
        evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut x = x0.to_vec();
    let mut total_iter = 0;
    let mut best = f64::INFINITY;
    let mut converged = false;
    for _ in 0..=opts.restarts {
        let budget = opts.max_iter.saturating_sub(total_iter);
        let (bx, bf, iters, ok) = run(&mut eval, &x, steps, opts, budget);
        total_iter += iters;
        x = bx;
        best = bf;
        converged = ok;
        if !ok {
            break;
        }
    }
    SimplexResult {
        x,
        f: best,
        iterations: total_iter,
        evaluations: evals,
        converged,
    }
}

fn run(
    eval: &mut impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    steps: &[f64],
    opts: &SimplexOptions,
    budget: usize,
) -> (Vec<f64>, f64, usize, bool) {
    let dim = x0.len();
    let mut pts: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..dim {
        let mut p = x0.to_vec();
        p[i] += steps[i];
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p)).collect();
    if dim == 0 {
        return (x0.to_vec(), vals[0], 0, true);
    }
    let mut iter = 0;
    loop {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let spread = vals[dim] - vals[0];
        let diameter = pts[1..]
            .iter()
            .flat_map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread.is_finite() && spread < opts.f_tol && diameter < opts.x_tol {
            return (pts[0].clone(), vals[0], iter, true);
        }
        if iter >= budget {
            return (pts[0].clone(), vals[0], iter, false);
        }
        iter += 1;

        let mut centroid = vec![0.0; dim];
        for p in &pts[..dim] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / dim as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&pts[dim])
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };
        let xr = along(-1.0);
        let fr = eval(&xr);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = eval(&xe);
            if fe < fr {
                pts[dim] = xe;
                vals[dim] = fe;
            } else {
                pts[dim] = xr;
                vals[dim] = fr;
            }
            continue;
        }
        if fr < vals[dim - 1] {
            pts[dim] = xr;
            vals[dim] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[dim] {
            let xc = along(-0.5);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = along(0.5);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < vals[dim].min(fr) {
            pts[dim] = xc;
            vals[dim] = fc;
            continue;
        }
        for i in 1..=dim {
            let shrunk: Vec<f64> = pts[0]
                .iter()
                .zip(&pts[i])
                .map(|(b, p)| b + 0.5 * (p - b))
                .collect();
            vals[i] = eval(&shrunk);
            pts[i] = shrunk;
        }
    }
}
