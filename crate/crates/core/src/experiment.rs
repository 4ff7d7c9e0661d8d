//! Seeded Monte Carlo experiments: risk/DOF sweeps over a threshold grid
//! and model-selection comparisons across estimator families.
//!
//! Determinism contract: trial t draws from a ChaCha substream keyed by
//! (master_seed, t) alone, and per-trial results are reduced in trial
//! order after the parallel map. Summaries are therefore bit-identical
//! across runs and across worker-pool sizes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::design::OrthogonalDesign;
use crate::error::{Error, Result};
use crate::risk::{estimate_sigma_mad, estimate_sigma2, ht_dof_theoretical, sure};
use crate::rules::{Family, ThresholdRule};
use crate::select::{active_set, actual_risk, grid_select, selection_error, universal_threshold};

/// Seed used by the built-in presets.
pub const DEFAULT_SEED: u64 = 42;

/// Built-in experiment scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Sparse spike truth (five unit coefficients), selection study.
    Case1,
    /// Power-decay truth b_k = 5/k on the first 64 components.
    Case2,
    /// DOF/risk/SURE sweep over a dense threshold grid, spike truth.
    Fig2,
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "case1" => Ok(Preset::Case1),
            "case2" => Ok(Preset::Case2),
            "fig2" => Ok(Preset::Fig2),
            other => Err(Error::InvalidParameter(format!(
                "unknown preset '{other}' (expected case1|case2|fig2)"
            ))),
        }
    }
}

impl std::fmt::Display for Preset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Preset::Case1 => "case1",
            Preset::Case2 => "case2",
            Preset::Fig2 => "fig2",
        })
    }
}

/// How the noise variance entering SURE (and the universal threshold) is
/// obtained in each trial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SigmaMode {
    /// Use the configured σ² as-is.
    #[default]
    Known,
    /// Unbiased estimate from the listed components (1-based indices whose
    /// true coefficients are zero).
    Estimated(Vec<usize>),
    /// Median-absolute-deviation estimate from the upper half of the
    /// coefficient vector.
    Mad,
}

/// A full Monte Carlo scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    pub sigma2: f64,
    /// Sparse truth as (1-based index, value) pairs.
    pub true_coeffs: Vec<(usize, f64)>,
    pub methods: Vec<Family>,
    pub lambda_grid: Vec<f64>,
    #[serde(default)]
    pub gamma_grid: Vec<f64>,
    #[serde(default)]
    pub m_grid: Vec<u32>,
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub sigma2_mode: SigmaMode,
    #[serde(default)]
    pub preset: Option<Preset>,
}

/// The threshold grid of the sweep presets: 0.01..0.10 by 0.01, 0.15..1.00
/// by 0.05, then 2..10 by 1.
pub fn sweep_lambda_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (1..=10).map(|k| k as f64 / 100.0).collect();
    grid.extend((3..=20).map(|k| (5 * k) as f64 / 100.0));
    grid.extend((2..=10).map(|k| k as f64));
    grid
}

/// The threshold grid of the selection presets: 0.02..0.10 by 0.01 and
/// 0.2..1.0 by 0.1.
pub fn selection_lambda_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (2..=10).map(|k| k as f64 / 100.0).collect();
    grid.extend((2..=10).map(|k| k as f64 / 10.0));
    grid
}

/// 100 logarithmically spaced thresholds in [0.01, 10], used to locate
/// curve peaks more precisely than the printed grid.
pub fn fine_lambda_grid() -> Vec<f64> {
    (0..100)
        .map(|i| 10f64.powf(-2.0 + 3.0 * i as f64 / 99.0))
        .collect()
}

fn hyper_grids_for_selection() -> (Vec<f64>, Vec<u32>) {
    (
        vec![1.1, 1.2, 1.5, 2.0, 3.0, 4.0, 5.0],
        vec![1, 3, 5, 7, 9, 11],
    )
}

impl Preset {
    /// The ready-to-run configuration for this preset.
    pub fn config(self) -> ExperimentConfig {
        let n = 256;
        let second_half: Vec<usize> = (n / 2 + 1..=n).collect();
        match self {
            Preset::Fig2 => ExperimentConfig {
                n,
                sigma2: 1.0,
                true_coeffs: (1..=5).map(|k| (k, 1.0)).collect(),
                methods: vec![Family::Hard, Family::Soft, Family::ScaledSoft],
                lambda_grid: sweep_lambda_grid(),
                gamma_grid: vec![],
                m_grid: vec![21],
                trials: 5000,
                master_seed: DEFAULT_SEED,
                sigma2_mode: SigmaMode::Known,
                preset: Some(Preset::Fig2),
            },
            Preset::Case1 | Preset::Case2 => {
                let (gamma_grid, m_grid) = hyper_grids_for_selection();
                let true_coeffs: Vec<(usize, f64)> = match self {
                    Preset::Case1 => (1..=5).map(|k| (k, 1.0)).collect(),
                    _ => (1..=64).map(|k| (k, 5.0 / k as f64)).collect(),
                };
                ExperimentConfig {
                    n,
                    sigma2: 1.0,
                    true_coeffs,
                    methods: vec![Family::Hard, Family::Soft, Family::Firm, Family::ScaledSoft],
                    lambda_grid: selection_lambda_grid(),
                    gamma_grid,
                    m_grid,
                    trials: 5000,
                    master_seed: DEFAULT_SEED,
                    sigma2_mode: SigmaMode::Estimated(second_half),
                    preset: Some(self),
                }
            }
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 4 || !self.n.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "n must be even and >= 4, got {}",
                self.n
            )));
        }
        if !(self.sigma2.is_finite() && self.sigma2 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sigma2 must be finite and >= 0, got {}",
                self.sigma2
            )));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be >= 1".to_string()));
        }
        if self.methods.is_empty() {
            return Err(Error::EmptyInput("methods".to_string()));
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(m) {
                return Err(Error::InvalidParameter(format!("duplicate method {m}")));
            }
        }
        if self.lambda_grid.is_empty() {
            return Err(Error::EmptyInput("lambda grid".to_string()));
        }
        if !self.lambda_grid.iter().all(|l| l.is_finite() && *l > 0.0) {
            return Err(Error::InvalidParameter(
                "lambda grid entries must be positive and finite".to_string(),
            ));
        }
        let needs_gamma = self
            .methods
            .iter()
            .any(|m| matches!(m, Family::Firm | Family::AdaptiveLasso));
        if needs_gamma && self.gamma_grid.is_empty() {
            return Err(Error::EmptyInput("gamma grid".to_string()));
        }
        if self.methods.contains(&Family::ScaledSoft) && self.m_grid.is_empty() {
            return Err(Error::EmptyInput("m grid".to_string()));
        }
        for &(k, v) in &self.true_coeffs {
            if k == 0 || k > self.n {
                return Err(Error::InvalidParameter(format!(
                    "true coefficient index {k} out of 1..={}",
                    self.n
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidParameter(
                    "true coefficient values must be finite".to_string(),
                ));
            }
        }
        if let SigmaMode::Estimated(idx) = &self.sigma2_mode {
            if idx.is_empty() {
                return Err(Error::EmptyInput("zero index set".to_string()));
            }
            if idx.iter().any(|&k| k == 0 || k > self.n) {
                return Err(Error::InvalidParameter(
                    "zero index set entries must lie in 1..=n".to_string(),
                ));
            }
        }
        Ok(())
    }

    /// Dense truth vector (0-based).
    pub fn dense_truth(&self) -> Vec<f64> {
        let mut b = vec![0.0; self.n];
        for &(k, v) in &self.true_coeffs {
            b[k - 1] = v;
        }
        b
    }

    /// 0-based support of the truth.
    pub fn true_support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self
            .true_coeffs
            .iter()
            .filter(|(_, v)| *v != 0.0)
            .map(|(k, _)| k - 1)
            .collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// The RNG substream for trial `t`.
    pub fn trial_rng(master_seed: u64, t: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(t as u64);
        rng
    }

    /// Noise variance used for SURE and the universal threshold in one
    /// trial, per the configured mode.
    fn trial_sigma2(&self, bhat: &[f64]) -> Result<f64> {
        match &self.sigma2_mode {
            SigmaMode::Known => Ok(self.sigma2),
            SigmaMode::Estimated(idx) => {
                let zero: Vec<usize> = idx.iter().map(|&k| k - 1).collect();
                estimate_sigma2(bhat, &zero)
            }
            SigmaMode::Mad => estimate_sigma_mad(&bhat[self.n / 2..], self.n),
        }
    }
}

/// One fixed estimator evaluated along the λ grid of a sweep.
#[derive(Debug, Clone)]
struct MethodInstance {
    family: Family,
    gamma: Option<f64>,
    m: Option<u32>,
    label: String,
}

impl MethodInstance {
    fn rule_at(&self, lambda: f64) -> Result<ThresholdRule> {
        match self.family {
            Family::Hard => ThresholdRule::hard(lambda),
            Family::Soft => ThresholdRule::soft(lambda),
            Family::Garrote => ThresholdRule::garrote(lambda),
            Family::Firm => ThresholdRule::firm(lambda, self.gamma.expect("validated")),
            Family::ScaledSoft => ThresholdRule::scaled_soft(lambda, self.m.expect("validated")),
            // Sweeps parameterize the adaptive lasso by its effective
            // threshold so all curves share the λ axis.
            Family::AdaptiveLasso => {
                let gamma = self.gamma.expect("validated");
                ThresholdRule::adaptive_lasso(lambda.powf(gamma + 1.0), gamma)
            }
        }
    }
}

fn expand_methods(config: &ExperimentConfig) -> Result<Vec<MethodInstance>> {
    let mut out = Vec::new();
    for &family in &config.methods {
        match family {
            Family::Hard | Family::Soft | Family::Garrote => {
                let mut inst = MethodInstance {
                    family,
                    gamma: None,
                    m: None,
                    label: String::new(),
                };
                inst.label = inst.rule_at(1.0)?.curve_label();
                out.push(inst);
            }
            Family::Firm | Family::AdaptiveLasso => {
                for &gamma in &config.gamma_grid {
                    let mut inst = MethodInstance {
                        family,
                        gamma: Some(gamma),
                        m: None,
                        label: String::new(),
                    };
                    inst.label = inst.rule_at(1.0)?.curve_label();
                    out.push(inst);
                }
            }
            Family::ScaledSoft => {
                for &m in &config.m_grid {
                    let mut inst = MethodInstance {
                        family,
                        gamma: None,
                        m: Some(m),
                        label: String::new(),
                    };
                    inst.label = inst.rule_at(1.0)?.curve_label();
                    out.push(inst);
                }
            }
        }
    }
    Ok(out)
}

/// One (method, λ) point of a sweep, aggregated over all trials.
///
/// `sure_*`, `dof*` and `stein_diff_sd` are absent for hard thresholding,
/// which has no data-driven SURE; `ht_d*_theory` are absent when σ² = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub lambda: f64,
    pub method: String,
    pub risk_mean: f64,
    pub risk_sd: f64,
    pub sure_mean: Option<f64>,
    pub sure_sd: Option<f64>,
    /// Standard deviation of the per-trial difference (sure − risk).
    pub sure_risk_diff_sd: Option<f64>,
    pub dof1_mean: Option<f64>,
    pub dof2_mean: Option<f64>,
    /// Monte Carlo covariance estimate n·mean Σ_k β̂_k(b̂_k − b_k).
    pub dof_emp_mean: f64,
    pub dof_emp_sd: f64,
    /// Standard deviation of the per-trial difference between the
    /// empirical covariance term and the formula DOF.
    pub stein_diff_sd: Option<f64>,
    pub ht_d1_theory: Option<f64>,
    pub ht_d2_theory: Option<f64>,
}

/// Per-method aggregate of a model-selection experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub risk_mean: f64,
    pub risk_sd: f64,
    pub khat_mean: f64,
    pub khat_sd: f64,
    pub serr_mean: f64,
    pub serr_sd: f64,
}

/// Aggregated experiment output. Sweeps fill `curves`; model-selection
/// runs fill `methods`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McSummary {
    pub config: ExperimentConfig,
    pub trials: usize,
    pub master_seed: u64,
    pub curves: Vec<SweepPoint>,
    pub methods: Vec<MethodSummary>,
}

/// Running sum and sum of squares; sd uses the S−1 denominator.
#[derive(Debug, Clone, Copy, Default)]
struct Accum {
    count: usize,
    sum: f64,
    sumsq: f64,
}

impl Accum {
    fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
        self.sumsq += x * x;
    }

    fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }

    fn sd(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let mean = self.mean();
        ((self.sumsq - self.count as f64 * mean * mean) / (self.count as f64 - 1.0))
            .max(0.0)
            .sqrt()
    }
}

const FIELDS: usize = 5; // risk, sure, d1, d2, empirical

/// Run the sweep: for every trial, method and grid threshold, record the
/// actual risk, SURE with its DOF split (non-hard rules), and the
/// empirical covariance form of the DOF; aggregate over trials.
pub fn run_sweep(config: &ExperimentConfig) -> Result<McSummary> {
    config.validate()?;
    let design = OrthogonalDesign::trig(config.n)?;
    let b = config.dense_truth();
    let instances = expand_methods(config)?;
    let n_l = config.lambda_grid.len();
    let n_m = instances.len();

    let per_trial: Vec<Vec<f64>> = (0..config.trials)
        .into_par_iter()
        .map(|t| -> Result<Vec<f64>> {
            let mut rng = ExperimentConfig::trial_rng(config.master_seed, t);
            let y = design.generate_observation(&b, config.sigma2, &mut rng)?;
            let bhat = design.analyze(&y)?;
            let s2 = config.trial_sigma2(&bhat)?;
            let mut rec = vec![f64::NAN; n_m * n_l * FIELDS];
            for (mi, inst) in instances.iter().enumerate() {
                for (li, &lambda) in config.lambda_grid.iter().enumerate() {
                    let rule = inst.rule_at(lambda)?;
                    let beta = rule.apply_vec(&bhat);
                    let risk = actual_risk(&beta, &b)?;
                    let emp: f64 = beta
                        .iter()
                        .zip(&bhat)
                        .zip(&b)
                        .map(|((&bh, &u), &bt)| bh * (u - bt))
                        .sum::<f64>()
                        * config.n as f64;
                    let base = (mi * n_l + li) * FIELDS;
                    rec[base] = risk;
                    rec[base + 4] = emp;
                    if inst.family != Family::Hard {
                        let report = sure(&rule, &bhat, s2)?;
                        rec[base + 1] = report.sure;
                        rec[base + 2] = report.dof.d1;
                        rec[base + 3] = report.dof.d2;
                    }
                }
            }
            Ok(rec)
        })
        .collect::<Result<_>>()?;

    // Sequential reduction in trial order keeps results independent of the
    // worker pool.
    let mut risk = vec![Accum::default(); n_m * n_l];
    let mut sure_acc = vec![Accum::default(); n_m * n_l];
    let mut diff = vec![Accum::default(); n_m * n_l];
    let mut d1 = vec![Accum::default(); n_m * n_l];
    let mut d2 = vec![Accum::default(); n_m * n_l];
    let mut emp = vec![Accum::default(); n_m * n_l];
    let mut stein = vec![Accum::default(); n_m * n_l];
    for rec in &per_trial {
        for p in 0..n_m * n_l {
            let base = p * FIELDS;
            risk[p].push(rec[base]);
            emp[p].push(rec[base + 4]);
            if !rec[base + 1].is_nan() {
                sure_acc[p].push(rec[base + 1]);
                diff[p].push(rec[base + 1] - rec[base]);
                d1[p].push(rec[base + 2]);
                d2[p].push(rec[base + 3]);
                stein[p].push(rec[base + 4] - (rec[base + 2] + rec[base + 3]));
            }
        }
    }

    let theory: Vec<Option<(f64, f64)>> = config
        .lambda_grid
        .iter()
        .map(|&lambda| {
            if config.sigma2 > 0.0 {
                ht_dof_theoretical(&b, config.sigma2, lambda)
                    .ok()
                    .map(|t| (t.d1, t.d2))
            } else {
                None
            }
        })
        .collect();

    let mut curves = Vec::with_capacity(n_m * n_l);
    for (mi, inst) in instances.iter().enumerate() {
        for (li, &lambda) in config.lambda_grid.iter().enumerate() {
            let p = mi * n_l + li;
            let has_sure = sure_acc[p].count > 0;
            curves.push(SweepPoint {
                lambda,
                method: inst.label.clone(),
                risk_mean: risk[p].mean(),
                risk_sd: risk[p].sd(),
                sure_mean: has_sure.then(|| sure_acc[p].mean()),
                sure_sd: has_sure.then(|| sure_acc[p].sd()),
                sure_risk_diff_sd: has_sure.then(|| diff[p].sd()),
                dof1_mean: has_sure.then(|| d1[p].mean()),
                dof2_mean: has_sure.then(|| d2[p].mean()),
                dof_emp_mean: emp[p].mean(),
                dof_emp_sd: emp[p].sd(),
                stein_diff_sd: has_sure.then(|| stein[p].sd()),
                ht_d1_theory: theory[li].map(|t| t.0),
                ht_d2_theory: theory[li].map(|t| t.1),
            });
        }
    }

    Ok(McSummary {
        config: config.clone(),
        trials: config.trials,
        master_seed: config.master_seed,
        curves,
        methods: Vec::new(),
    })
}

/// Run the model-selection experiment: per trial and family, estimate the
/// noise variance, select the rule (SURE grid search, or the universal
/// threshold for hard thresholding), and record risk, active-set size and
/// selection error against the true support.
pub fn run_model_selection(config: &ExperimentConfig) -> Result<McSummary> {
    config.validate()?;
    let design = OrthogonalDesign::trig(config.n)?;
    let b = config.dense_truth();
    let support = config.true_support();
    let n_m = config.methods.len();
    let m_grid_f: Vec<f64> = config.m_grid.iter().map(|&m| f64::from(m)).collect();

    let per_trial: Vec<Vec<f64>> = (0..config.trials)
        .into_par_iter()
        .map(|t| -> Result<Vec<f64>> {
            let mut rng = ExperimentConfig::trial_rng(config.master_seed, t);
            let y = design.generate_observation(&b, config.sigma2, &mut rng)?;
            let bhat = design.analyze(&y)?;
            let s2 = config.trial_sigma2(&bhat)?;
            let mut rec = vec![0.0f64; n_m * 3];
            for (mi, &family) in config.methods.iter().enumerate() {
                let (rule, active) = match family {
                    Family::Hard => {
                        let lambda = universal_threshold(s2, config.n)?;
                        (ThresholdRule::hard(lambda)?, active_set(&bhat, lambda))
                    }
                    Family::Soft | Family::Garrote => {
                        let sel = grid_select(family, &config.lambda_grid, None, &bhat, s2)?;
                        (sel.rule, sel.active_set)
                    }
                    Family::Firm | Family::AdaptiveLasso => {
                        let sel = grid_select(
                            family,
                            &config.lambda_grid,
                            Some(&config.gamma_grid),
                            &bhat,
                            s2,
                        )?;
                        (sel.rule, sel.active_set)
                    }
                    Family::ScaledSoft => {
                        let sel =
                            grid_select(family, &config.lambda_grid, Some(&m_grid_f), &bhat, s2)?;
                        (sel.rule, sel.active_set)
                    }
                };
                let beta = rule.apply_vec(&bhat);
                rec[mi * 3] = actual_risk(&beta, &b)?;
                rec[mi * 3 + 1] = active.len() as f64;
                rec[mi * 3 + 2] = selection_error(&support, &active) as f64;
            }
            Ok(rec)
        })
        .collect::<Result<_>>()?;

    let mut acc = vec![Accum::default(); n_m * 3];
    for rec in &per_trial {
        for (a, &x) in acc.iter_mut().zip(rec) {
            a.push(x);
        }
    }

    let methods = config
        .methods
        .iter()
        .enumerate()
        .map(|(mi, family)| MethodSummary {
            method: family.as_str().to_string(),
            risk_mean: acc[mi * 3].mean(),
            risk_sd: acc[mi * 3].sd(),
            khat_mean: acc[mi * 3 + 1].mean(),
            khat_sd: acc[mi * 3 + 1].sd(),
            serr_mean: acc[mi * 3 + 2].mean(),
            serr_sd: acc[mi * 3 + 2].sd(),
        })
        .collect();

    Ok(McSummary {
        config: config.clone(),
        trials: config.trials,
        master_seed: config.master_seed,
        curves: Vec::new(),
        methods,
    })
}

/// Monte Carlo estimate of the covariance form of the degrees of freedom,
/// n·mean_t Σ_k β̂_k(b̂_k − b_k), for any rule including hard thresholding.
pub fn empirical_dof(config: &ExperimentConfig, rule: &ThresholdRule) -> Result<f64> {
    config.validate()?;
    let design = OrthogonalDesign::trig(config.n)?;
    let b = config.dense_truth();
    let per_trial: Vec<f64> = (0..config.trials)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            let mut rng = ExperimentConfig::trial_rng(config.master_seed, t);
            let y = design.generate_observation(&b, config.sigma2, &mut rng)?;
            let bhat = design.analyze(&y)?;
            Ok(bhat
                .iter()
                .zip(&b)
                .map(|(&u, &bt)| rule.apply(u) * (u - bt))
                .sum::<f64>()
                * config.n as f64)
        })
        .collect::<Result<_>>()?;
    Ok(per_trial.iter().sum::<f64>() / config.trials as f64)
}
