//! Acceptance suite: one test per shipping criterion, each ending with a
//! printed PASS line (run with `--nocapture` to see them). The Monte Carlo
//! criteria share fixed-seed 5000-trial experiments through lazy statics.

use std::sync::OnceLock;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use threshbridge::{
    DEFAULT_SEED, ExperimentConfig, Family, McSummary, OrthogonalDesign, Preset, SigmaMode,
    SweepPoint, ThresholdRule, fine_lambda_grid, hard_jump, ideal_scaling, io, run_model_selection,
    run_sweep,
};

const TRIALS: usize = 5000;

fn case1_truth() -> Vec<(usize, f64)> {
    (1..=5).map(|k| (k, 1.0)).collect()
}

fn fig2_summary() -> &'static McSummary {
    static CELL: OnceLock<McSummary> = OnceLock::new();
    CELL.get_or_init(|| run_sweep(&Preset::Fig2.config()).expect("fig2 sweep"))
}

fn stein_summary() -> &'static McSummary {
    static CELL: OnceLock<McSummary> = OnceLock::new();
    CELL.get_or_init(|| {
        let config = ExperimentConfig {
            n: 256,
            sigma2: 1.0,
            true_coeffs: case1_truth(),
            methods: vec![
                Family::Hard,
                Family::Soft,
                Family::Garrote,
                Family::Firm,
                Family::ScaledSoft,
                Family::AdaptiveLasso,
            ],
            lambda_grid: vec![0.0625, 0.5, 1.0],
            gamma_grid: vec![2.0],
            m_grid: vec![5, 21],
            trials: TRIALS,
            master_seed: DEFAULT_SEED,
            sigma2_mode: SigmaMode::Known,
            preset: None,
        };
        run_sweep(&config).expect("stein sweep")
    })
}

fn fine_sweep_summary() -> &'static McSummary {
    static CELL: OnceLock<McSummary> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut config = Preset::Fig2.config();
        config.methods = vec![Family::ScaledSoft];
        config.lambda_grid = fine_lambda_grid();
        config.preset = None;
        run_sweep(&config).expect("fine sweep")
    })
}

fn m_convergence_summary() -> &'static McSummary {
    static CELL: OnceLock<McSummary> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut config = Preset::Fig2.config();
        config.methods = vec![Family::ScaledSoft];
        config.lambda_grid = vec![0.0625];
        config.m_grid = vec![3, 7, 21, 51];
        config.preset = None;
        run_sweep(&config).expect("m-convergence sweep")
    })
}

fn case1_summary() -> &'static McSummary {
    static CELL: OnceLock<McSummary> = OnceLock::new();
    CELL.get_or_init(|| run_model_selection(&Preset::Case1.config()).expect("case1"))
}

fn case2_summary() -> &'static McSummary {
    static CELL: OnceLock<McSummary> = OnceLock::new();
    CELL.get_or_init(|| run_model_selection(&Preset::Case2.config()).expect("case2"))
}

fn point<'a>(summary: &'a McSummary, method: &str, lambda: f64) -> &'a SweepPoint {
    summary
        .curves
        .iter()
        .find(|p| p.method == method && p.lambda == lambda)
        .unwrap_or_else(|| panic!("missing point {method} @ {lambda}"))
}

fn curve<'a>(summary: &'a McSummary, method: &str) -> Vec<&'a SweepPoint> {
    summary
        .curves
        .iter()
        .filter(|p| p.method == method)
        .collect()
}

#[test]
fn criterion_1_operator_identities() {
    let lambdas = [0.05, 0.25, 1.0, 2.5];
    let us: Vec<f64> = (-400..=400).map(|k| k as f64 / 40.0).collect();
    for &lambda in &lambdas {
        let soft = ThresholdRule::soft(lambda).unwrap();
        let hard = ThresholdRule::hard(lambda).unwrap();
        let garrote = ThresholdRule::garrote(lambda).unwrap();
        let sst1 = ThresholdRule::scaled_soft(lambda, 1).unwrap();
        for &u in &us {
            // Garrote is the first-order scaled soft rule.
            assert!(
                (garrote.apply(u) - sst1.apply(u)).abs() <= 1e-12,
                "ng vs sst(1) at λ={lambda}, u={u}"
            );
            // Hard = soft + jump.
            assert!(
                (hard.apply(u) - (soft.apply(u) + hard_jump(lambda, u))).abs() <= 1e-12,
                "H = S + M at λ={lambda}, u={u}"
            );
            // Exact rescaling reproduces the identity above the threshold.
            if u.abs() > lambda * (1.0 + 1e-9) {
                let w = ideal_scaling(lambda, u).unwrap();
                assert!(
                    (w * soft.apply(u) - u).abs() <= 1e-12 * u.abs().max(1.0),
                    "ideal scaling at λ={lambda}, u={u}"
                );
            }
            // Soft ≤ scaled soft ≤ hard on u ≥ 0.
            if u >= 0.0 {
                for m in [1u32, 3, 9, 21] {
                    let sst = ThresholdRule::scaled_soft(lambda, m).unwrap().apply(u);
                    assert!(soft.apply(u) <= sst + 1e-12);
                    assert!(sst <= hard.apply(u) + 1e-12);
                }
            }
            // Adaptive lasso at λ_R = λ^{m+1}, γ = m matches scaled soft.
            for m in [1u32, 5, 11] {
                let sst = ThresholdRule::scaled_soft(lambda, m).unwrap();
                let al =
                    ThresholdRule::adaptive_lasso(lambda.powi(m as i32 + 1), f64::from(m)).unwrap();
                assert!(
                    (sst.apply(u) - al.apply(u)).abs() <= 1e-12 * u.abs().max(1.0),
                    "al vs sst at λ={lambda}, m={m}, u={u}"
                );
            }
        }
    }
    println!("criterion 1 PASS: operator identities hold to 1e-12");
}

#[test]
fn criterion_2_orthogonality_and_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for n in [4usize, 8, 64, 256, 1024] {
        let design = OrthogonalDesign::trig(n).unwrap();
        let dev = design.max_gram_deviation();
        assert!(dev <= 1e-8, "n={n}: max |XᵀX - nI| = {dev:e}");

        let beta: Vec<f64> = (0..n)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let y = design.synthesize(&beta).unwrap();
        let back = design.analyze(&y).unwrap();
        let scale: f64 = beta.iter().map(|v| v * v).sum::<f64>().sqrt();
        let err: f64 = beta
            .iter()
            .zip(&back)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(err <= 1e-9 * scale, "n={n}: coefficient round trip {err:e}");

        let y0: Vec<f64> = (0..n)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let y1 = design.synthesize(&design.analyze(&y0).unwrap()).unwrap();
        let yscale: f64 = y0.iter().map(|v| v * v).sum::<f64>().sqrt();
        let yerr: f64 = y0
            .iter()
            .zip(&y1)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(yerr <= 1e-9 * yscale, "n={n}: signal round trip {yerr:e}");
    }
    println!(
        "criterion 2 PASS: Gram deviation <= 1e-8 and round trips <= 1e-9 for n in {{4,8,64,256,1024}}"
    );
}

#[test]
fn criterion_3_stein_identity() {
    let summary = stein_summary();
    let sqrt_s = (TRIALS as f64).sqrt();
    let methods = [
        "st",
        "ng",
        "ft(gamma=2)",
        "sst(m=5)",
        "sst(m=21)",
        "al(gamma=2)",
    ];
    for method in methods {
        for lambda in [0.0625, 0.5, 1.0] {
            let p = point(summary, method, lambda);
            let formula = p.dof1_mean.unwrap() + p.dof2_mean.unwrap();
            let gap = (p.dof_emp_mean - formula).abs();
            let se = p.stein_diff_sd.unwrap() / sqrt_s;
            assert!(
                gap <= 3.0 * se,
                "{method} @ λ={lambda}: |emp - formula| = {gap:.4} > 3·se = {:.4}",
                3.0 * se
            );
        }
    }
    // Hard thresholding has no formula DOF; its empirical covariance must
    // match the theoretical closed form instead.
    for lambda in [0.0625, 0.5, 1.0] {
        let p = point(summary, "ht", lambda);
        let theory = p.ht_d1_theory.unwrap() + p.ht_d2_theory.unwrap();
        let se = p.dof_emp_sd / sqrt_s;
        assert!(
            (p.dof_emp_mean - theory).abs() <= 3.0 * se,
            "ht @ λ={lambda}: emp {} vs theory {theory}",
            p.dof_emp_mean
        );
    }
    println!(
        "criterion 3 PASS: Stein identity within 3 MC standard errors for st/ng/ft/sst/al (+ht vs closed form)"
    );
}

#[test]
fn criterion_4_sure_unbiasedness() {
    let summary = fig2_summary();
    let sqrt_s = (TRIALS as f64).sqrt();
    for method in ["st", "sst(m=21)"] {
        for p in curve(summary, method) {
            let gap = (p.sure_mean.unwrap() - p.risk_mean).abs();
            let se = p.sure_risk_diff_sd.unwrap() / sqrt_s;
            assert!(
                gap <= 3.0 * se,
                "{method} @ λ={}: |mean sure - mean risk| = {gap:.5} > 3·se = {:.5}",
                p.lambda,
                3.0 * se
            );
        }
    }
    println!(
        "criterion 4 PASS: SURE unbiased within 3 MC standard errors for st and sst(m=21) on the full sweep grid"
    );
}

#[test]
fn criterion_5_search_dof_matches_hard_threshold_theory() {
    // Across λ ∈ [0.01, 1] the mean excess-DOF curve of sst(m=21) stays
    // within 10% of the theoretical hard-thresholding curve, measured
    // against the curve's own scale (its peak); at the noise level
    // τ = 0.0625 the match is also within 10% pointwise.
    let summary = fig2_summary();
    let pts: Vec<_> = curve(summary, "sst(m=21)")
        .into_iter()
        .filter(|p| p.lambda >= 0.01 && p.lambda <= 1.0)
        .collect();
    assert_eq!(pts.len(), 28);
    let peak_theory = pts
        .iter()
        .map(|p| p.ht_d2_theory.unwrap())
        .fold(0.0f64, f64::max);
    assert!(peak_theory > 0.0);
    for p in &pts {
        let gap = (p.dof2_mean.unwrap() - p.ht_d2_theory.unwrap()).abs();
        assert!(
            gap <= 0.10 * peak_theory,
            "λ={}: |mean d2 - theory| = {gap:.3} > 10% of peak {peak_theory:.3}",
            p.lambda
        );
    }
    let at_tau = point(m_convergence_summary(), "sst(m=21)", 0.0625);
    let rel = (at_tau.dof2_mean.unwrap() - at_tau.ht_d2_theory.unwrap()).abs()
        / at_tau.ht_d2_theory.unwrap();
    assert!(rel <= 0.10, "pointwise gap at τ_n: {:.1}%", 100.0 * rel);

    // The peak of the empirical curve sits at the coefficient noise level
    // τ_n = σ/√n = 0.0625: locate it on the fine grid.
    let fine = fine_sweep_summary();
    let peak = curve(fine, "sst(m=21)")
        .into_iter()
        .max_by(|a, b| {
            a.dof2_mean
                .unwrap()
                .partial_cmp(&b.dof2_mean.unwrap())
                .unwrap()
        })
        .unwrap();
    assert!(
        peak.lambda >= 0.05 && peak.lambda <= 0.08,
        "d2 peak at λ = {}",
        peak.lambda
    );
    println!(
        "criterion 5 PASS: sst(m=21) search DOF within 10% of the hard-threshold curve on [0.01,1]; peak at λ = {:.4}",
        peak.lambda
    );
}

#[test]
fn criterion_6_risk_curve_shapes() {
    let summary = fig2_summary();
    let argmin = |method: &str| -> f64 {
        curve(summary, method)
            .into_iter()
            .min_by(|a, b| a.risk_mean.partial_cmp(&b.risk_mean).unwrap())
            .unwrap()
            .lambda
    };
    let st_min = argmin("st");
    let sst_min = argmin("sst(m=21)");
    let ht_min = argmin("ht");
    assert!(
        st_min < sst_min && st_min < ht_min,
        "risk minimizers: st {st_min}, sst {sst_min}, ht {ht_min}"
    );

    let window: Vec<f64> = summary
        .config
        .lambda_grid
        .iter()
        .copied()
        .filter(|l| (0.05..=0.1).contains(l))
        .collect();
    assert!(!window.is_empty());
    let exceeds = |method: &str| {
        window
            .iter()
            .any(|&l| point(summary, method, l).risk_mean > point(summary, "st", l).risk_mean)
    };
    assert!(exceeds("ht"), "ht risk never exceeds st in [0.05, 0.1]");
    assert!(
        exceeds("sst(m=21)"),
        "sst risk never exceeds st in [0.05, 0.1]"
    );
    println!(
        "criterion 6 PASS: st risk minimized at λ = {st_min} < sst {sst_min} / ht {ht_min}; ht and sst risk exceed st near τ_n"
    );
}

struct Table1Target {
    method: &'static str,
    stat: &'static str,
    mean: f64,
    sd: f64,
}

fn check_table1(summary: &McSummary, targets: &[Table1Target]) {
    let sqrt_s = (TRIALS as f64).sqrt();
    for t in targets {
        let row = summary
            .methods
            .iter()
            .find(|m| m.method == t.method)
            .unwrap_or_else(|| panic!("missing method {}", t.method));
        let got = match t.stat {
            "risk" => row.risk_mean,
            "khat" => row.khat_mean,
            "serr" => row.serr_mean,
            other => panic!("unknown stat {other}"),
        };
        let tol = (0.10 * t.mean).max(3.0 * t.sd / sqrt_s);
        assert!(
            (got - t.mean).abs() <= tol,
            "{} {}: got {got:.4}, want {:.4} ± {tol:.4}",
            t.method,
            t.stat,
            t.mean
        );
    }
}

#[test]
#[rustfmt::skip]
fn criterion_7_model_selection_replication() {
    let c1 = case1_summary();
    check_table1(
        c1,
        &[
            Table1Target { method: "ht", stat: "risk", mean: 0.0300, sd: 0.0257 },
            Table1Target { method: "st", stat: "risk", mean: 0.1164, sd: 0.0406 },
            Table1Target { method: "ft", stat: "risk", mean: 0.0606, sd: 0.1199 },
            Table1Target { method: "sst", stat: "risk", mean: 0.0384, sd: 0.0651 },
            Table1Target { method: "st", stat: "khat", mean: 39.2140, sd: 12.6461 },
            Table1Target { method: "sst", stat: "khat", mean: 7.1930, sd: 7.1939 },
        ],
    );
    let risk = |s: &McSummary, m: &str| {
        s.methods.iter().find(|r| r.method == m).unwrap().risk_mean
    };
    // Case-1 ordering: hard best, soft worst.
    for m in ["st", "ft", "sst"] {
        assert!(risk(c1, "ht") < risk(c1, m), "case1: ht not best vs {m}");
    }
    for m in ["ht", "ft", "sst"] {
        assert!(risk(c1, "st") > risk(c1, m), "case1: st not worst vs {m}");
    }

    let c2 = case2_summary();
    check_table1(
        c2,
        &[
            Table1Target { method: "st", stat: "risk", mean: 0.5393, sd: 0.0690 },
            Table1Target { method: "sst", stat: "risk", mean: 0.5600, sd: 0.1170 },
            Table1Target { method: "ht", stat: "risk", mean: 0.7876, sd: 0.1058 },
            Table1Target { method: "st", stat: "khat", mean: 126.7680, sd: 20.1387 },
        ],
    );
    // Case-2 reverses the ranking: soft best, hard worst.
    for m in ["ht", "ft", "sst"] {
        assert!(risk(c2, "st") < risk(c2, m), "case2: st not best vs {m}");
    }
    for m in ["st", "ft", "sst"] {
        assert!(risk(c2, "ht") > risk(c2, m), "case2: ht not worst vs {m}");
    }
    println!(
        "criterion 7 PASS: selection study replicated (case1 ht/st/ft/sst risk {:.4}/{:.4}/{:.4}/{:.4}; case2 st/sst/ft/ht {:.4}/{:.4}/{:.4}/{:.4})",
        risk(c1, "ht"), risk(c1, "st"), risk(c1, "ft"), risk(c1, "sst"),
        risk(c2, "st"), risk(c2, "sst"), risk(c2, "ft"), risk(c2, "ht"),
    );
}

#[test]
fn criterion_8_convergence_in_expansion_order() {
    let summary = m_convergence_summary();
    let lambda = 0.0625;
    let gaps: Vec<f64> = [3u32, 7, 21, 51]
        .iter()
        .map(|m| {
            let p = point(summary, &format!("sst(m={m})"), lambda);
            (p.dof2_mean.unwrap() - p.ht_d2_theory.unwrap()).abs()
        })
        .collect();
    for w in gaps.windows(2) {
        assert!(w[1] < w[0], "gaps not decreasing: {gaps:?}");
    }
    assert!(
        gaps[3] <= gaps[0] / 3.0,
        "m=51 gap {:.3} not below a third of m=3 gap {:.3}",
        gaps[3],
        gaps[0]
    );
    println!(
        "criterion 8 PASS: |mean d2(m) - hard-threshold theory| decreases over m = 3,7,21,51: {:.3} > {:.3} > {:.3} > {:.3}",
        gaps[0], gaps[1], gaps[2], gaps[3]
    );
}

#[test]
fn criterion_9_determinism() {
    // Re-running a preset reproduces the shared fixture byte for byte.
    let again = run_sweep(&Preset::Fig2.config()).unwrap();
    let csv_a = io::sweep_csv(fig2_summary());
    let csv_b = io::sweep_csv(&again);
    assert_eq!(csv_a, csv_b, "sweep CSV differs between runs");
    let json_a = serde_json::to_string_pretty(fig2_summary()).unwrap();
    let json_b = serde_json::to_string_pretty(&again).unwrap();
    assert_eq!(json_a, json_b, "sweep JSON differs between runs");

    // Worker-pool size must not leak into the output bytes.
    let mut quick = Preset::Case1.config();
    quick.trials = 200;
    let pool1 = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let pool4 = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap();
    let s1 = pool1.install(|| run_model_selection(&quick)).unwrap();
    let s4 = pool4.install(|| run_model_selection(&quick)).unwrap();
    assert_eq!(io::selection_csv(&s1), io::selection_csv(&s4));
    assert_eq!(
        serde_json::to_string_pretty(&s1).unwrap(),
        serde_json::to_string_pretty(&s4).unwrap()
    );
    println!(
        "criterion 9 PASS: byte-identical CSV/JSON across repeated runs and worker-pool sizes"
    );
}
