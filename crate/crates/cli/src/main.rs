//! Command-line front end: denoise signals with thresholding rules, run
//! seeded risk/DOF sweeps and model-selection experiments, render charts,
//! and build or validate orthogonal designs.
//!
//! Exit codes: 0 success, 2 invalid flags, 3 unreadable or malformed input
//! files, 4 SURE requested for hard thresholding (which has none).

mod plot;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use threshbridge::{
    Error, ExperimentConfig, Family, McSummary, OrthogonalDesign, Preset, SureReport,
    ThresholdRule, active_set, estimate_sigma_mad, estimate_sigma2, fine_lambda_grid, grid_select,
    io, run_model_selection, run_sweep, selection_lambda_grid, sure, universal_threshold,
};

const EXIT_USAGE: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_NO_SURE: u8 = 4;

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

/// Flag-level validation errors exit with 2; anything that went wrong
/// while reading or interpreting an input file exits with 3.
fn usage_err(e: Error) -> CliError {
    CliError::usage(e.to_string())
}

fn input_err(e: Error) -> CliError {
    CliError::input(e.to_string())
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "threshbridge",
    version,
    about = "Thresholding estimators for orthogonal regression: denoising, SURE selection, Monte Carlo experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Threshold-denoise a signal with a fixed rule.
    Denoise(DenoiseArgs),
    /// Pick a rule by SURE grid search (or the universal threshold for ht)
    /// and denoise with it.
    Select(SelectArgs),
    /// Run a risk/DOF/SURE sweep over a threshold grid.
    Sweep(RunArgs),
    /// Run a model-selection comparison across estimator families.
    Montecarlo(RunArgs),
    /// Render a sweep CSV as an SVG chart.
    Plot(PlotArgs),
    /// Build the trigonometric design or validate a stored one.
    Design(DesignArgs),
}

#[derive(Args)]
struct DenoiseArgs {
    /// Single-column CSV with the observed signal (even length).
    signal: PathBuf,
    /// Estimator family: ht|st|ng|ft|sst|al.
    #[arg(long)]
    method: String,
    /// Threshold level λ (all families except al).
    #[arg(long)]
    lambda: Option<f64>,
    /// Band parameter γ > 1 (ft only).
    #[arg(long)]
    gamma: Option<f64>,
    /// Expansion order m, odd (sst only).
    #[arg(long)]
    m: Option<u32>,
    /// Regularization level λ_R (al only; combine with --gamma > 0).
    #[arg(long = "lambda-r")]
    lambda_r: Option<f64>,
    /// Noise variance: a number, `estimate`, or `mad`.
    #[arg(long)]
    sigma2: String,
    /// Require the SURE block in the report (fails for ht).
    #[arg(long)]
    sure: bool,
    /// Optional design CSV; defaults to the built-in trigonometric basis.
    #[arg(long)]
    design: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct SelectArgs {
    /// Single-column CSV with the observed signal (even length).
    signal: PathBuf,
    /// Estimator family: ht|st|ng|ft|sst|al.
    #[arg(long)]
    method: String,
    /// Noise variance: a number, `estimate`, or `mad`.
    #[arg(long)]
    sigma2: String,
    /// Optional design CSV; defaults to the built-in trigonometric basis.
    #[arg(long)]
    design: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment configuration JSON.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in scenario: case1|case2|fig2.
    #[arg(long)]
    preset: Option<String>,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Cap the trial count at 200 for fast runs.
    #[arg(long)]
    quick: bool,
    /// Replace the threshold grid with 100 log-spaced points in [0.01, 10]
    /// (sweep only).
    #[arg(long)]
    fine: bool,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct PlotArgs {
    /// Sweep CSV produced by the sweep subcommand.
    csv: PathBuf,
    /// Chart kind: dof|risk.
    #[arg(long)]
    kind: String,
    /// Method label to plot DOF curves for (defaults to the first
    /// scaled-soft curve).
    #[arg(long)]
    method: Option<String>,
    /// Output SVG path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DesignArgs {
    /// Build the trigonometric design of this (even) size.
    #[arg(long, conflicts_with = "load")]
    n: Option<usize>,
    /// Validate a stored design CSV instead of building one.
    #[arg(long)]
    load: Option<PathBuf>,
    /// Where to save the design CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Denoise(args) => cmd_denoise(args),
        Command::Select(args) => cmd_select(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Montecarlo(args) => cmd_montecarlo(args),
        Command::Plot(args) => cmd_plot(args),
        Command::Design(args) => cmd_design(args),
    }
}

enum SigmaSpec {
    Declared(f64),
    Estimate,
    Mad,
}

impl SigmaSpec {
    fn parse(s: &str) -> CliResult<Self> {
        match s {
            "estimate" => Ok(SigmaSpec::Estimate),
            "mad" => Ok(SigmaSpec::Mad),
            other => {
                let v: f64 = other.parse().map_err(|_| {
                    CliError::usage(format!(
                        "--sigma2 must be a number, 'estimate' or 'mad', got '{other}'"
                    ))
                })?;
                if !(v.is_finite() && v >= 0.0) {
                    return Err(CliError::usage(format!(
                        "--sigma2 must be finite and >= 0, got {v}"
                    )));
                }
                Ok(SigmaSpec::Declared(v))
            }
        }
    }

    fn label(&self) -> &'static str {
        match self {
            SigmaSpec::Declared(_) => "declared",
            SigmaSpec::Estimate => "estimated",
            SigmaSpec::Mad => "mad",
        }
    }

    /// Resolve against analyzed coefficients. The estimators use the upper
    /// half of the spectrum as the putative noise-only components.
    fn resolve(&self, bhat: &[f64]) -> CliResult<f64> {
        let n = bhat.len();
        match self {
            SigmaSpec::Declared(v) => Ok(*v),
            SigmaSpec::Estimate => {
                let idx: Vec<usize> = (n / 2..n).collect();
                estimate_sigma2(bhat, &idx).map_err(input_err)
            }
            SigmaSpec::Mad => estimate_sigma_mad(&bhat[n / 2..], n).map_err(input_err),
        }
    }
}

fn rule_from_flags(args: &DenoiseArgs, family: Family) -> CliResult<ThresholdRule> {
    let need_lambda = |opt: Option<f64>| {
        opt.ok_or_else(|| CliError::usage(format!("--lambda is required for {family}")))
    };
    let rule = match family {
        Family::Hard => ThresholdRule::hard(need_lambda(args.lambda)?),
        Family::Soft => ThresholdRule::soft(need_lambda(args.lambda)?),
        Family::Garrote => ThresholdRule::garrote(need_lambda(args.lambda)?),
        Family::Firm => {
            let gamma = args
                .gamma
                .ok_or_else(|| CliError::usage("--gamma is required for ft"))?;
            ThresholdRule::firm(need_lambda(args.lambda)?, gamma)
        }
        Family::ScaledSoft => {
            let m = args
                .m
                .ok_or_else(|| CliError::usage("--m is required for sst"))?;
            ThresholdRule::scaled_soft(need_lambda(args.lambda)?, m)
        }
        Family::AdaptiveLasso => {
            let lambda_r = args
                .lambda_r
                .ok_or_else(|| CliError::usage("--lambda-r is required for al"))?;
            let gamma = args
                .gamma
                .ok_or_else(|| CliError::usage("--gamma is required for al"))?;
            ThresholdRule::adaptive_lasso(lambda_r, gamma)
        }
    };
    rule.map_err(usage_err)
}

/// Load the signal and design, returning (design, coefficients).
fn load_problem(signal: &Path, design: Option<&Path>) -> CliResult<(OrthogonalDesign, Vec<f64>)> {
    let y = io::read_signal_csv(signal).map_err(input_err)?;
    if y.len() % 2 != 0 {
        return Err(CliError::input(format!(
            "{}: signal length {} is odd; the transform needs an even length",
            signal.display(),
            y.len()
        )));
    }
    let design = match design {
        Some(path) => {
            let d = io::load_design_csv(path).map_err(input_err)?;
            if d.n() != y.len() {
                return Err(CliError::input(format!(
                    "design is {}x{} but the signal has {} samples",
                    d.n(),
                    d.n(),
                    y.len()
                )));
            }
            d
        }
        None => OrthogonalDesign::trig(y.len()).map_err(input_err)?,
    };
    let bhat = design.analyze(&y).map_err(input_err)?;
    Ok((design, bhat))
}

fn ensure_out_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::input(format!("cannot create {}: {e}", dir.display())))
}

#[derive(Serialize)]
struct DenoiseReport {
    method: String,
    rule: ThresholdRule,
    lambda_effective: f64,
    sigma2: f64,
    sigma2_source: &'static str,
    k_hat: usize,
    /// 1-based indices of the surviving coefficients.
    active_set: Vec<usize>,
    sure: Option<SureReport>,
}

fn write_fit_outputs(
    out: &Path,
    design: &OrthogonalDesign,
    beta: &[f64],
    report: &impl Serialize,
    report_name: &str,
) -> CliResult<()> {
    ensure_out_dir(out)?;
    let denoised = design.synthesize(beta).map_err(input_err)?;
    io::write_signal_csv(&out.join("denoised.csv"), &denoised).map_err(input_err)?;
    io::write_signal_csv(&out.join("coefficients.csv"), beta).map_err(input_err)?;
    io::write_json(&out.join(report_name), report).map_err(input_err)?;
    Ok(())
}

fn cmd_denoise(args: DenoiseArgs) -> CliResult<()> {
    let family = Family::from_str(&args.method).map_err(usage_err)?;
    let rule = rule_from_flags(&args, family)?;
    let sigma_spec = SigmaSpec::parse(&args.sigma2)?;
    if args.sure && family == Family::Hard {
        return Err(CliError {
            code: EXIT_NO_SURE,
            message:
                "hard thresholding has no data-driven SURE; drop --sure or pick another method"
                    .to_string(),
        });
    }
    let (design, bhat) = load_problem(&args.signal, args.design.as_deref())?;
    let sigma2 = sigma_spec.resolve(&bhat)?;
    let beta = rule.apply_vec(&bhat);
    let lambda_effective = rule.effective_threshold();
    let active: Vec<usize> = active_set(&bhat, lambda_effective)
        .into_iter()
        .map(|k| k + 1)
        .collect();
    let sure_report = if family == Family::Hard {
        None
    } else {
        Some(sure(&rule, &bhat, sigma2).map_err(input_err)?)
    };
    let report = DenoiseReport {
        method: rule.curve_label(),
        rule,
        lambda_effective,
        sigma2,
        sigma2_source: sigma_spec.label(),
        k_hat: active.len(),
        active_set: active,
        sure: sure_report,
    };
    write_fit_outputs(&args.out, &design, &beta, &report, "report.json")?;
    println!(
        "denoised {} samples with {} (k_hat = {})",
        design.n(),
        report.method,
        report.k_hat
    );
    Ok(())
}

#[derive(Serialize)]
struct SelectReport {
    method: String,
    rule: ThresholdRule,
    lambda_effective: f64,
    sigma2: f64,
    sigma2_source: &'static str,
    sure: Option<f64>,
    k_hat: usize,
    /// 1-based indices of the surviving coefficients.
    active_set: Vec<usize>,
    searched: usize,
}

fn cmd_select(args: SelectArgs) -> CliResult<()> {
    let family = Family::from_str(&args.method).map_err(usage_err)?;
    let sigma_spec = SigmaSpec::parse(&args.sigma2)?;
    let (design, bhat) = load_problem(&args.signal, args.design.as_deref())?;
    let sigma2 = sigma_spec.resolve(&bhat)?;

    let lambda_grid = selection_lambda_grid();
    let (gamma_grid, m_grid): (Vec<f64>, Vec<f64>) = (
        vec![1.1, 1.2, 1.5, 2.0, 3.0, 4.0, 5.0],
        vec![1.0, 3.0, 5.0, 7.0, 9.0, 11.0],
    );
    let (rule, sure_min, searched) = match family {
        Family::Hard => {
            let lambda = universal_threshold(sigma2, design.n()).map_err(input_err)?;
            (ThresholdRule::hard(lambda).map_err(input_err)?, None, 1)
        }
        _ => {
            let hyper: Option<&[f64]> = match family {
                Family::Firm | Family::AdaptiveLasso => Some(&gamma_grid),
                Family::ScaledSoft => Some(&m_grid),
                _ => None,
            };
            let sel = grid_select(family, &lambda_grid, hyper, &bhat, sigma2).map_err(input_err)?;
            (sel.rule, Some(sel.sure), sel.searched)
        }
    };
    let beta = rule.apply_vec(&bhat);
    let lambda_effective = rule.effective_threshold();
    let active: Vec<usize> = active_set(&bhat, lambda_effective)
        .into_iter()
        .map(|k| k + 1)
        .collect();
    let report = SelectReport {
        method: rule.curve_label(),
        rule,
        lambda_effective,
        sigma2,
        sigma2_source: sigma_spec.label(),
        sure: sure_min,
        k_hat: active.len(),
        active_set: active,
        searched,
    };
    write_fit_outputs(&args.out, &design, &beta, &report, "selection.json")?;
    println!(
        "selected {} at lambda = {} (k_hat = {}, searched {} grid points)",
        report.method, lambda_effective, report.k_hat, report.searched
    );
    Ok(())
}

fn resolve_config(args: &RunArgs) -> CliResult<ExperimentConfig> {
    let mut config = match (&args.config, &args.preset) {
        (Some(path), None) => io::read_config_json(path).map_err(input_err)?,
        (None, Some(name)) => Preset::from_str(name).map_err(usage_err)?.config(),
        _ => {
            return Err(CliError::usage(
                "exactly one of --config or --preset is required",
            ));
        }
    };
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if let Some(trials) = args.trials {
        config.trials = trials;
    }
    if args.quick {
        config.trials = config.trials.min(200);
    }
    if args.fine {
        config.lambda_grid = fine_lambda_grid();
    }
    config.validate().map_err(usage_err)?;
    Ok(config)
}

fn write_summary(out: &Path, summary: &McSummary, csv_name: &str, csv: String) -> CliResult<()> {
    ensure_out_dir(out)?;
    std::fs::write(out.join(csv_name), csv)
        .map_err(|e| CliError::input(format!("cannot write {csv_name}: {e}")))?;
    io::write_json(&out.join("summary.json"), summary).map_err(input_err)?;
    Ok(())
}

fn cmd_sweep(args: RunArgs) -> CliResult<()> {
    let config = resolve_config(&args)?;
    let summary = run_sweep(&config).map_err(usage_err)?;
    write_summary(&args.out, &summary, "sweep.csv", io::sweep_csv(&summary))?;
    println!(
        "swept {} thresholds x {} methods over {} trials (seed {}) -> {}",
        config.lambda_grid.len(),
        config.methods.len(),
        config.trials,
        config.master_seed,
        args.out.display()
    );
    Ok(())
}

fn cmd_montecarlo(args: RunArgs) -> CliResult<()> {
    if args.fine {
        return Err(CliError::usage("--fine only applies to sweep"));
    }
    let config = resolve_config(&args)?;
    let summary = run_model_selection(&config).map_err(usage_err)?;
    write_summary(
        &args.out,
        &summary,
        "selection.csv",
        io::selection_csv(&summary),
    )?;
    println!(
        "compared {} methods over {} trials (seed {}) -> {}",
        config.methods.len(),
        config.trials,
        config.master_seed,
        args.out.display()
    );
    Ok(())
}

fn cmd_plot(args: PlotArgs) -> CliResult<()> {
    let rows = io::read_sweep_csv(&args.csv).map_err(input_err)?;
    let mut methods: Vec<String> = Vec::new();
    for r in &rows {
        if !methods.contains(&r.method) {
            methods.push(r.method.clone());
        }
    }
    let series = match args.kind.as_str() {
        "dof" => {
            let target = match &args.method {
                Some(m) => m.clone(),
                None => methods
                    .iter()
                    .find(|m| m.starts_with("sst"))
                    .or_else(|| {
                        methods.iter().find(|m| {
                            rows.iter()
                                .any(|r| &r.method == *m && r.dof1_mean.is_some())
                        })
                    })
                    .cloned()
                    .ok_or_else(|| CliError::input("no rows with DOF columns to plot"))?,
            };
            let pts: Vec<_> = rows.iter().filter(|r| r.method == target).collect();
            if pts.is_empty() || pts.iter().any(|r| r.dof1_mean.is_none()) {
                return Err(CliError::input(format!(
                    "method '{target}' has no DOF columns in {}",
                    args.csv.display()
                )));
            }
            let take = |f: &dyn Fn(&io::SweepCsvRow) -> Option<f64>| -> Vec<(f64, f64)> {
                pts.iter()
                    .filter_map(|r| f(r).map(|v| (r.lambda, v)))
                    .collect()
            };
            vec![
                plot::Series {
                    label: format!("{target} d1"),
                    color: plot::PALETTE[0],
                    dashed: false,
                    points: take(&|r| r.dof1_mean),
                },
                plot::Series {
                    label: format!("{target} d2"),
                    color: plot::PALETTE[1],
                    dashed: false,
                    points: take(&|r| r.dof2_mean),
                },
                plot::Series {
                    label: format!("{target} d1+d2"),
                    color: plot::PALETTE[2],
                    dashed: false,
                    points: take(&|r| {
                        Some(r.dof1_mean.unwrap_or(f64::NAN) + r.dof2_mean.unwrap_or(f64::NAN))
                    }),
                },
                plot::Series {
                    label: "ht d2 theory".to_string(),
                    color: plot::PALETTE[3],
                    dashed: true,
                    points: take(&|r| r.ht_d2_theory),
                },
            ]
        }
        "risk" => {
            let mut series = Vec::new();
            for (i, m) in methods.iter().enumerate() {
                let pts: Vec<(f64, f64)> = rows
                    .iter()
                    .filter(|r| &r.method == m)
                    .map(|r| (r.lambda, r.risk_mean))
                    .collect();
                series.push(plot::Series {
                    label: format!("{m} risk"),
                    color: plot::PALETTE[i % plot::PALETTE.len()],
                    dashed: false,
                    points: pts,
                });
                let sure_pts: Vec<(f64, f64)> = rows
                    .iter()
                    .filter(|r| &r.method == m)
                    .filter_map(|r| r.sure_mean.map(|v| (r.lambda, v)))
                    .collect();
                if !sure_pts.is_empty() {
                    series.push(plot::Series {
                        label: format!("{m} sure"),
                        color: plot::PALETTE[i % plot::PALETTE.len()],
                        dashed: true,
                        points: sure_pts,
                    });
                }
            }
            series
        }
        other => {
            return Err(CliError::usage(format!(
                "--kind must be dof or risk, got '{other}'"
            )));
        }
    };
    let title = match args.kind.as_str() {
        "dof" => "Degrees of freedom vs threshold level",
        _ => "Risk and SURE vs threshold level",
    };
    let svg = plot::render(title, &args.kind, &series)
        .ok_or_else(|| CliError::input("no plottable points in the CSV"))?;
    if let Some(dir) = args.out.parent()
        && !dir.as_os_str().is_empty()
    {
        ensure_out_dir(dir)?;
    }
    std::fs::write(&args.out, svg)
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", args.out.display())))?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn cmd_design(args: DesignArgs) -> CliResult<()> {
    let design = match (args.n, &args.load) {
        (Some(n), None) => OrthogonalDesign::trig(n).map_err(usage_err)?,
        (None, Some(path)) => io::load_design_csv(path).map_err(input_err)?,
        _ => {
            return Err(CliError::usage("exactly one of --n or --load is required"));
        }
    };
    if let Some(out) = &args.out {
        if let Some(dir) = out.parent()
            && !dir.as_os_str().is_empty()
        {
            ensure_out_dir(dir)?;
        }
        io::save_design_csv(out, &design).map_err(input_err)?;
    }
    println!(
        "design ok: n = {}, max |X'X - nI| = {:.3e}",
        design.n(),
        design.max_gram_deviation()
    );
    Ok(())
}
