//! Command-line front end.
//!
//! Every verb reads CSV/JSON, calls one library routine and writes its
//! serialized result, to `--out` or standard output. Failures print a single
//! line `error: <code>: <message>` and exit with 1 for invalid input or 2 for
//! numeric failures such as non-convergence.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use sarfima::estimators::{
    gph_estimate, gph_single_with_plan, whittle_estimate, WhittleOptions, WhittleTemplate,
};
use sarfima::io::{read_json, read_series, series_csv, sidecar_path, to_json};
use sarfima::montecarlo::{
    cells_csv, cells_replicates_csv, design, run_cells, run_mc_with, McConfig, McSummary,
    RunOptions,
};
use sarfima::pipeline::{bandwidth_scan, fractional_filter, sample_acf_pacf};
use sarfima::simulate::{default_grid_exponent, simulate, SimConfig, SimMethod};
use sarfima::spectrum::{
    build_band_plan_with, gph_t_bandwidth, gph_t_bandwidth_uncapped, periodogram, power_bandwidth,
    BandPlan, BandPlanOptions,
};
use sarfima::{Error, Result, Spec};

#[derive(Debug, Parser)]
#[command(name = "sarfima", version, about = "Seasonal fractional ARIMA toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a series from a model JSON file.
    Simulate(SimulateArgs),
    /// Periodogram of a series as `j,lambda,ordinate`.
    Periodogram(PeriodogramArgs),
    /// Log-periodogram estimate of the memory parameters.
    EstimateGph(GphArgs),
    /// Whittle fit of a model template.
    EstimateWhittle(WhittleArgs),
    /// Remove fractional factors with known memories.
    Filter(FilterArgs),
    /// Log-periodogram estimates over a range of bandwidths.
    Scan(ScanArgs),
    /// Sample ACF and PACF.
    Acf(AcfArgs),
    /// Monte Carlo study from a config file or a built-in design.
    Mc(McArgs),
}

#[derive(Debug, Args)]
struct Output {
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    ExactDl,
    TruncatedMa,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_enum, default_value = "exact-dl")]
    method: MethodArg,
    #[arg(long)]
    grid_exponent: Option<u32>,
    #[arg(long)]
    ma_truncation: Option<usize>,
    #[arg(long, default_value_t = 5000)]
    burn_in: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct PeriodogramArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Keep the sample mean.
    #[arg(long)]
    no_demean: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct BandwidthArgs {
    /// Bandwidth m = floor(n^alpha).
    #[arg(long, group = "bw")]
    alpha: Option<f64>,
    /// Explicit bandwidth.
    #[arg(long, group = "bw")]
    m: Option<usize>,
    /// Full inter-harmonic gap, capped to keep bands disjoint.
    #[arg(long, group = "bw")]
    gph_t: bool,
    /// Let bands overlap (with --gph-t: the uncapped full gap).
    #[arg(long)]
    allow_overlap: bool,
}

#[derive(Debug, Args)]
struct GphArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    s1: usize,
    #[arg(long)]
    s2: Option<usize>,
    #[command(flatten)]
    bandwidth: BandwidthArgs,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct WhittleArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Template JSON (`{"spec": ..., "free": ...}`) or a plain model JSON.
    #[arg(long, conflicts_with_all = ["s1", "s2", "ar", "ma"])]
    template: Option<PathBuf>,
    #[arg(long, required_unless_present = "template")]
    s1: Option<usize>,
    #[arg(long)]
    s2: Option<usize>,
    /// AR factor `LAG` or `LAG:ORDER`; repeatable.
    #[arg(long)]
    ar: Vec<String>,
    /// MA factor `LAG` or `LAG:ORDER`; repeatable.
    #[arg(long)]
    ma: Vec<String>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct FilterArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Memories, comma separated.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    d: Vec<f64>,
    /// Periods, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    periods: Vec<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    s1: usize,
    #[arg(long)]
    s2: Option<usize>,
    /// Bandwidth exponents, comma separated and increasing.
    #[arg(long, value_delimiter = ',', required = true)]
    alphas: Vec<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct AcfArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    max_lag: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct McArgs {
    /// Monte Carlo config JSON.
    #[arg(long, required_unless_present = "design", conflicts_with = "design")]
    config: Option<PathBuf>,
    /// Built-in design: table1 .. table5.
    #[arg(long)]
    design: Option<String>,
    /// Only the design cell with this label, e.g. `phi4=0.8`.
    #[arg(long, requires = "design")]
    cell: Option<String>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: u64,
    /// Worker threads (default: SARFIMA_THREADS, else all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Per-replication estimates as CSV.
    #[arg(long)]
    dump: Option<PathBuf>,
    /// Full summary as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

/// Parses `args` (including the program name), runs the verb and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let msg = e.to_string();
            let text: Vec<&str> = msg
                .lines()
                .take_while(|l| !l.starts_with("Usage:"))
                .map(|l| l.trim().trim_start_matches("error: "))
                .filter(|l| !l.is_empty())
                .collect();
            eprintln!("error: usage: {}", text.join(" "));
            return 1;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}: {}", e.code(), single_line(&e.to_string()));
            if e.is_numeric() {
                2
            } else {
                1
            }
        }
    }
}

fn single_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn emit(output: &Output, text: &str) -> Result<()> {
    match &output.out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Periodogram(a) => {
            let x = read_series(&a.input)?;
            emit(&a.output, &periodogram(&x, !a.no_demean)?.to_csv())
        }
        Command::EstimateGph(a) => cmd_gph(a),
        Command::EstimateWhittle(a) => cmd_whittle(a),
        Command::Filter(a) => {
            let x = read_series(&a.input)?;
            emit(&a.output, &series_csv(&fractional_filter(&x, &a.d, &a.periods)?))
        }
        Command::Scan(a) => {
            let x = read_series(&a.input)?;
            emit(&a.output, &bandwidth_scan(&x, a.s1, a.s2, &a.alphas)?.to_csv())
        }
        Command::Acf(a) => {
            let x = read_series(&a.input)?;
            emit(&a.output, &sample_acf_pacf(&x, a.max_lag)?.to_csv())
        }
        Command::Mc(a) => cmd_mc(a),
    }
}

fn cmd_simulate(a: SimulateArgs) -> Result<()> {
    let spec: Spec = read_json(&a.spec)?;
    let mut cfg = SimConfig::new(spec, a.n, a.seed);
    cfg.method = match a.method {
        MethodArg::ExactDl => SimMethod::ExactDl,
        MethodArg::TruncatedMa => SimMethod::TruncatedMa,
    };
    cfg.grid_exponent = a.grid_exponent.unwrap_or_else(|| default_grid_exponent(a.n));
    if let Some(t) = a.ma_truncation {
        cfg.ma_truncation = t;
    }
    cfg.burn_in = a.burn_in;
    let x = simulate(&cfg)?;
    emit(&a.output, &series_csv(&x))?;
    if let Some(out) = &a.output.out {
        fs::write(sidecar_path(out), to_json(&cfg)?)?;
    }
    Ok(())
}

fn resolve_m(bw: &BandwidthArgs, n: usize, s1: usize, s2: usize) -> Result<usize> {
    if let Some(m) = bw.m {
        Ok(m)
    } else if let Some(alpha) = bw.alpha {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidArgument(format!("alpha {alpha} is outside (0, 1)")));
        }
        Ok(power_bandwidth(n, alpha))
    } else if bw.gph_t && bw.allow_overlap {
        Ok(gph_t_bandwidth_uncapped(n, s1, s2))
    } else if bw.gph_t {
        Ok(gph_t_bandwidth(n, s1, s2))
    } else {
        Err(Error::InvalidArgument(
            "give a bandwidth with --alpha, --m or --gph-t".into(),
        ))
    }
}

fn cmd_gph(a: GphArgs) -> Result<()> {
    if let Some(s2) = a.s2 {
        sarfima::spectrum::ordered_periods(a.s1, s2)?;
    }
    let x = read_series(&a.input)?;
    let n = x.len();
    let plan_opts = BandPlanOptions {
        allow_overlap: a.bandwidth.allow_overlap,
    };
    let est = match a.s2 {
        Some(s2) => {
            let m = resolve_m(&a.bandwidth, n, a.s1, s2)?;
            let pgram = periodogram(&x, true)?;
            let plan = build_band_plan_with(n, a.s1, s2, m, plan_opts)?;
            gph_estimate(&pgram, &plan, a.s1, s2)?
        }
        None => {
            let m = resolve_m(&a.bandwidth, n, a.s1, 1)?;
            let pgram = periodogram(&x, true)?;
            let plan = BandPlan::single_with(n, a.s1, m, plan_opts)?;
            gph_single_with_plan(&pgram, &plan)?
        }
    };
    emit(&a.output, &to_json(&est)?)
}

fn parse_factor(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidArgument(format!("factor {s:?} is not LAG or LAG:ORDER"));
    let (lag, order) = match s.split_once(':') {
        Some((l, o)) => (l.parse().map_err(|_| bad())?, o.parse().map_err(|_| bad())?),
        None => (s.parse().map_err(|_| bad())?, 1),
    };
    if lag == 0 || order == 0 {
        return Err(bad());
    }
    Ok((lag, order))
}

fn load_template(path: &Path) -> Result<WhittleTemplate<f64>> {
    let text = fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    if value.get("spec").is_some() {
        Ok(serde_json::from_value(value)?)
    } else {
        Ok(WhittleTemplate::new(serde_json::from_value(value)?))
    }
}

fn cmd_whittle(a: WhittleArgs) -> Result<()> {
    let x = read_series(&a.input)?;
    let template = match &a.template {
        Some(p) => load_template(p)?,
        None => {
            let mut periods = vec![a.s1.expect("required by clap")];
            periods.extend(a.s2);
            let mut t = WhittleTemplate::pure(&periods);
            for f in &a.ar {
                let (lag, order) = parse_factor(f)?;
                t = t.with_ar(lag, order);
            }
            for f in &a.ma {
                let (lag, order) = parse_factor(f)?;
                t = t.with_ma(lag, order);
            }
            t
        }
    };
    let mut opts = WhittleOptions::default();
    if let Some(mi) = a.max_iter {
        opts.simplex.max_iter = mi;
    }
    let fit = whittle_estimate(&x, &template, &opts)?;
    emit(&a.output, &to_json(&fit)?)?;
    if fit.converged {
        Ok(())
    } else {
        Err(Error::NotConverged(fit.iterations))
    }
}

fn threads(arg: Option<usize>) -> Result<Option<usize>> {
    if arg.is_some() {
        return Ok(arg);
    }
    match std::env::var("SARFIMA_THREADS") {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::InvalidArgument(format!("SARFIMA_THREADS={v:?} is not a count"))),
        _ => Ok(None),
    }
}

fn cmd_mc(a: McArgs) -> Result<()> {
    let opts = RunOptions {
        threads: threads(a.threads)?,
        skip_quadrature_check: false,
    };
    let (csv, dump, json) = match (&a.config, &a.design) {
        (Some(path), _) => {
            let mut cfg: McConfig = read_json(path)?;
            cfg.master_seed = a.seed;
            if let Some(r) = a.reps {
                cfg.reps = r;
            }
            let run = run_mc_with(&cfg, opts)?;
            (run.summary.to_csv(), run.replicates_csv(), to_json(&run.summary)?)
        }
        (None, Some(name)) => {
            let reps = a
                .reps
                .ok_or_else(|| Error::InvalidArgument("--design needs --reps".into()))?;
            let mut cells = design(name, reps, a.seed)?;
            if let Some(label) = &a.cell {
                cells.retain(|c| &c.label == label);
                if cells.is_empty() {
                    return Err(Error::InvalidArgument(format!(
                        "design {name} has no cell {label:?}"
                    )));
                }
            }
            let runs = run_cells(&cells, opts)?;
            let summaries: Vec<(&str, &McSummary)> =
                runs.iter().map(|r| (r.label.as_str(), &r.run.summary)).collect();
            (cells_csv(&runs), cells_replicates_csv(&runs), to_json(&summaries)?)
        }
        (None, None) => unreachable!("clap requires --config or --design"),
    };
    emit(&a.output, &csv)?;
    if let Some(p) = &a.dump {
        fs::write(p, dump)?;
    }
    if let Some(p) = &a.json {
        fs::write(p, json)?;
    }
    Ok(())
}
