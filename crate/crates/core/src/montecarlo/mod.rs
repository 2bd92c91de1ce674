//! Monte Carlo replication of estimator performance.
//!
//! Replication `r` simulates from seed [`replication_seed`]`(master_seed, r)`
//! and every estimator sees the same series. Replications run in parallel but
//! are reduced in replication order, so results do not depend on scheduling or
//! thread count.

mod designs;
mod stats;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{
    gph_estimate, gph_single_with_plan, whittle_from_periodogram, WhittleOptions, WhittleTemplate,
};
use crate::model::SarfimaSpec;
use crate::simulate::{check_quadrature, default_grid_exponent, replication_seed, SimConfig, SimMethod, Simulator};
use crate::spectrum::{
    build_band_plan_with, gph_t_bandwidth, gph_t_bandwidth_uncapped, periodogram, power_bandwidth,
    BandPlan, BandPlanOptions, Periodogram,
};

pub use designs::{cells_csv, cells_replicates_csv, design, design_names, run_cells, CellRun, DesignCell};
pub use stats::{standardized_sample, Standardized};

/// Bandwidth rule of a log-periodogram estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bandwidth {
    /// `floor(n^alpha)`
    Power(f64),
    /// Full inter-harmonic gap, capped so that bands stay disjoint.
    GphT,
    /// Full inter-harmonic gap with overlapping bands.
    GphTUncapped,
    Fixed(usize),
}

impl Bandwidth {
    pub fn resolve(&self, n: usize, periods: &[usize]) -> usize {
        let s1 = periods.first().copied().unwrap_or(1);
        let s2 = periods.get(1).copied().unwrap_or(1);
        match *self {
            Bandwidth::Power(a) => power_bandwidth(n, a),
            Bandwidth::GphT => gph_t_bandwidth(n, s1, s2),
            Bandwidth::GphTUncapped => gph_t_bandwidth_uncapped(n, s1, s2),
            Bandwidth::Fixed(m) => m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum EstimatorKind {
    /// Log-periodogram regression at the periods of the simulated model.
    Gph { bandwidth: Bandwidth },
    Whittle { template: WhittleTemplate<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: EstimatorKind,
}

impl EstimatorSpec {
    pub fn gph(name: &str, bandwidth: Bandwidth) -> Self {
        Self {
            name: name.into(),
            kind: EstimatorKind::Gph { bandwidth },
        }
    }

    pub fn whittle(name: &str, template: WhittleTemplate<f64>) -> Self {
        Self {
            name: name.into(),
            kind: EstimatorKind::Whittle { template },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    pub method: SimMethod,
    /// Defaults to [`default_grid_exponent`] for the sample size.
    pub grid_exponent: Option<u32>,
    pub ma_truncation: usize,
    pub burn_in: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            method: SimMethod::ExactDl,
            grid_exponent: None,
            ma_truncation: 5000,
            burn_in: 5000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub spec: SarfimaSpec<f64>,
    pub estimators: Vec<EstimatorSpec>,
    pub reps: usize,
    pub n: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub sim: SimOptions,
}

impl McConfig {
    pub fn new(spec: SarfimaSpec<f64>, estimators: Vec<EstimatorSpec>, n: usize, reps: usize, master_seed: u64) -> Self {
        Self {
            spec,
            estimators,
            reps,
            n,
            master_seed,
            sim: SimOptions::default(),
        }
    }

    fn sim_config(&self) -> SimConfig {
        SimConfig {
            spec: self.spec.clone(),
            n: self.n,
            seed: self.master_seed,
            method: self.sim.method,
            grid_exponent: self.sim.grid_exponent.unwrap_or_else(|| default_grid_exponent(self.n)),
            ma_truncation: self.sim.ma_truncation.max(50 * self.spec.max_period()),
            burn_in: self.sim.burn_in,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamSummary {
    pub name: String,
    pub truth: f64,
    pub mean: f64,
    /// Mean squared deviation from the truth, divisor = successful reps.
    pub mse: f64,
    /// Divisor = successful reps, so `mse = (mean - truth)^2 + variance`.
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorSummary {
    pub name: String,
    pub params: Vec<ParamSummary>,
    /// Correlation of the two memory estimates.
    pub corr: Option<f64>,
    pub successes: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McSummary {
    pub n: usize,
    pub reps: usize,
    pub master_seed: u64,
    pub estimators: Vec<EstimatorSummary>,
}

impl McSummary {
    pub fn estimator(&self, name: &str) -> Option<&EstimatorSummary> {
        self.estimators.iter().find(|e| e.name == name)
    }

    /// CSV `estimator,param,mean,mse,corr`; `corr` is filled on the memory
    /// rows of two-period estimators.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SUMMARY_HEADER);
        self.write_rows(&mut out, "");
        out
    }

    pub(crate) fn write_rows(&self, out: &mut String, prefix: &str) {
        for e in &self.estimators {
            for p in &e.params {
                let corr = match e.corr {
                    Some(c) if p.name.starts_with('d') => format!("{c}"),
                    _ => String::new(),
                };
                out.push_str(&format!("{prefix}{},{},{},{},{corr}\n", e.name, p.name, p.mean, p.mse));
            }
        }
    }
}

impl EstimatorSummary {
    pub fn param(&self, name: &str) -> Option<&ParamSummary> {
        self.params.iter().find(|p| p.name == name)
    }
}

/// Estimates of one replication, one entry per estimator (`None` on failure).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Replicate {
    pub rep: usize,
    pub seed: u64,
    pub estimates: Vec<Option<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McRun {
    pub summary: McSummary,
    pub parameter_names: Vec<Vec<String>>,
    pub replicates: Vec<Replicate>,
}

impl McRun {
    /// Successful estimates of one estimator.
    pub fn estimates(&self, estimator: usize) -> Vec<Vec<f64>> {
        self.replicates
            .iter()
            .filter_map(|r| r.estimates[estimator].clone())
            .collect()
    }

    /// CSV `rep,seed,estimator,param,value` with one row per estimate;
    /// failed replications have an empty parameter and value.
    pub fn replicates_csv(&self) -> String {
        let mut out = String::from(REPLICATES_HEADER);
        self.write_replicates(&mut out, "");
        out
    }

    pub(crate) fn write_replicates(&self, out: &mut String, prefix: &str) {
        for r in &self.replicates {
            for (i, est) in r.estimates.iter().enumerate() {
                let name = &self.summary.estimators[i].name;
                match est {
                    Some(v) => {
                        for (p, x) in self.parameter_names[i].iter().zip(v) {
                            out.push_str(&format!("{},{},{prefix}{name},{p},{x}\n", r.rep, r.seed));
                        }
                    }
                    None => out.push_str(&format!("{},{},{prefix}{name},,\n", r.rep, r.seed)),
                }
            }
        }
    }
}

pub(crate) const SUMMARY_HEADER: &str = "estimator,param,mean,mse,corr\n";
pub(crate) const REPLICATES_HEADER: &str = "rep,seed,estimator,param,value\n";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    /// Skip the grid-doubling check of the autocovariance quadrature.
    pub skip_quadrature_check: bool,
}

pub fn run_mc(config: &McConfig) -> Result<McSummary> {
    Ok(run_mc_with(config, RunOptions::default())?.summary)
}

pub fn run_mc_with(config: &McConfig, opts: RunOptions) -> Result<McRun> {
    match opts.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
            pool.install(|| run_inner(config, opts))
        }
        None => run_inner(config, opts),
    }
}

struct Prepared {
    names: Vec<String>,
    truth: Vec<f64>,
    run: Box<dyn Fn(&Periodogram<f64>) -> Option<Vec<f64>> + Send + Sync>,
}

fn run_inner(config: &McConfig, opts: RunOptions) -> Result<McRun> {
    if config.reps == 0 {
        return Err(Error::InvalidArgument("reps must be at least 1".into()));
    }
    if config.estimators.is_empty() {
        return Err(Error::InvalidArgument("no estimators given".into()));
    }
    let sim = config.sim_config();
    if sim.method == SimMethod::ExactDl && !opts.skip_quadrature_check {
        check_quadrature(&config.spec, sim.grid_exponent, 50.min(config.n - 1))?;
    }
    let simulator = Simulator::new(&sim)?;
    let prepared: Vec<Prepared> = config
        .estimators
        .iter()
        .map(|e| prepare(e, config))
        .collect::<Result<_>>()?;

    let replicates: Vec<Replicate> = (0..config.reps)
        .into_par_iter()
        .map(|rep| {
            let seed = replication_seed(config.master_seed, rep as u64);
            let x = simulator.sample(seed);
            let estimates = match periodogram(&x, true) {
                Ok(p) => prepared.iter().map(|e| (e.run)(&p)).collect(),
                Err(_) => vec![None; prepared.len()],
            };
            Replicate { rep, seed, estimates }
        })
        .collect();

    let estimators = prepared
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let ok: Vec<&Vec<f64>> = replicates.iter().filter_map(|r| r.estimates[i].as_ref()).collect();
            summarize(&config.estimators[i].name, p, &ok, config.reps)
        })
        .collect();
    Ok(McRun {
        summary: McSummary {
            n: config.n,
            reps: config.reps,
            master_seed: config.master_seed,
            estimators,
        },
        parameter_names: prepared.into_iter().map(|p| p.names).collect(),
        replicates,
    })
}

fn summarize(name: &str, p: &Prepared, ok: &[&Vec<f64>], reps: usize) -> EstimatorSummary {
    let k = ok.len() as f64;
    let params = p
        .names
        .iter()
        .enumerate()
        .map(|(j, pname)| {
            let truth = p.truth[j];
            if ok.is_empty() {
                return ParamSummary {
                    name: pname.clone(),
                    truth,
                    mean: f64::NAN,
                    mse: f64::NAN,
                    variance: f64::NAN,
                };
            }
            let mean = ok.iter().map(|v| v[j]).sum::<f64>() / k;
            ParamSummary {
                name: pname.clone(),
                truth,
                mean,
                mse: ok.iter().map(|v| (v[j] - truth).powi(2)).sum::<f64>() / k,
                variance: ok.iter().map(|v| (v[j] - mean).powi(2)).sum::<f64>() / k,
            }
        })
        .collect::<Vec<_>>();
    let d_idx: Vec<usize> = p
        .names
        .iter()
        .enumerate()
        .filter(|(_, n)| n.starts_with('d'))
        .map(|(i, _)| i)
        .collect();
    let corr = if d_idx.len() == 2 && ok.len() > 1 {
        let a: Vec<f64> = ok.iter().map(|v| v[d_idx[0]]).collect();
        let b: Vec<f64> = ok.iter().map(|v| v[d_idx[1]]).collect();
        Some(stats::correlation(&a, &b))
    } else {
        None
    };
    EstimatorSummary {
        name: name.into(),
        params,
        corr,
        successes: ok.len(),
        failures: reps - ok.len(),
    }
}

/// True value of a named parameter; coefficients absent from the model are zero.
fn truth_of(spec: &SarfimaSpec<f64>, name: &str) -> f64 {
    if let Some(i) = name.strip_prefix('d').and_then(|s| s.parse::<usize>().ok()) {
        return spec.components.get(i - 1).map_or(0.0, |c| c.d);
    }
    for (prefix, factors) in [("phi", &spec.ar), ("theta", &spec.ma)] {
        if let Some(rest) = name.strip_prefix(prefix) {
            let (lag, k) = match rest.split_once('_') {
                Some((l, k)) => (l.parse::<usize>().ok(), k.parse::<usize>().ok()),
                None => (rest.parse::<usize>().ok(), Some(1)),
            };
            if let (Some(lag), Some(k)) = (lag, k) {
                return factors
                    .iter()
                    .find(|f| f.lag == lag)
                    .and_then(|f| f.coeffs.get(k - 1).copied())
                    .unwrap_or(0.0);
            }
        }
    }
    0.0
}

fn prepare(e: &EstimatorSpec, config: &McConfig) -> Result<Prepared> {
    let n = config.n;
    let periods = config.spec.periods();
    match &e.kind {
        EstimatorKind::Gph { bandwidth } => {
            let m = bandwidth.resolve(n, &periods);
            let allow_overlap = matches!(bandwidth, Bandwidth::GphTUncapped);
            let plan_opts = BandPlanOptions { allow_overlap };
            let names: Vec<String> = (1..=periods.len()).map(|i| format!("d{i}")).collect();
            let truth = names.iter().map(|nm| truth_of(&config.spec, nm)).collect();
            let run: Box<dyn Fn(&Periodogram<f64>) -> Option<Vec<f64>> + Send + Sync> = match *periods {
                [s] => {
                    let plan = BandPlan::single_with(n, s, m, plan_opts)?;
                    Box::new(move |p| gph_single_with_plan(p, &plan).ok().map(|e| e.d_hat))
                }
                [s1, s2] => {
                    let plan = build_band_plan_with(n, s1, s2, m, plan_opts)?;
                    Box::new(move |p| gph_estimate(p, &plan, s1, s2).ok().map(|e| e.d_hat))
                }
                _ => unreachable!("validated spec has one or two components"),
            };
            Ok(Prepared { names, truth, run })
        }
        EstimatorKind::Whittle { template } => {
            template.spec.validate()?;
            let names = template.parameter_names();
            let truth = names.iter().map(|nm| truth_of(&config.spec, nm)).collect();
            let template = template.clone();
            let opts = WhittleOptions {
                compute_cov: false,
                ..WhittleOptions::default()
            };
            Ok(Prepared {
                names,
                truth,
                run: Box::new(move |p| {
                    whittle_from_periodogram(p, &template, &opts)
                        .ok()
                        .filter(|f| f.converged)
                        .map(|f| f.estimates)
                }),
            })
        }
    }
}
