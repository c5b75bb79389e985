//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs with `cargo test --workspace`.

use std::time::{Duration, Instant};

use shrinkreg::numerics::chisq_cdf;
use shrinkreg::shrinkage::{coordinatewise_median, weiszfeld_step, WeiszfeldStep};
use shrinkreg::{
    chisq_quantile, l1_objective, ols_fit, shrinkage_mean, shrinkage_scatter, sr_fit, Cholesky,
    Data, Method,
};
use shrinkreg_cli::builtin_dataset;
use shrinkreg_sim::output::write_metrics_csv;
use shrinkreg_sim::{
    breakdown_run, efficiency, equivariance_run, generate, integer_grid, mse_table, refined_grid,
    RunOptions, Scenario, ScenarioConfig, TransformKind,
};

const SEED: u64 = 42;

// Criterion 1: star data.
const STAR_OUTLIERS: [usize; 6] = [7, 9, 11, 20, 30, 34];
const STAR_OLS: (f64, f64) = (6.7935, -0.4133);
const STAR_OLS_TOL: f64 = 1e-3;
const STAR_OLS_R2: f64 = 0.0443;
const STAR_OLS_R2_TOL: f64 = 0.001;
const STAR_SR_R2: f64 = 0.7113;
const STAR_SR_R2_TOL: f64 = 0.05;
const STAR_SR_COEF: (f64, f64) = (-7.4035, 2.9028);
const STAR_SR_COEF_TOL: f64 = 0.5;

// Criterion 2: HBK data.
const HBK_ADJ_R2: f64 = 0.9818;
const HBK_ADJ_R2_TOL: f64 = 0.01;

const EFFICIENCY_RANGE: (f64, f64) = (0.93, 1.02);
const TE_MSE_RANGE: (f64, f64) = (0.006, 0.020);
const NEO_SR_MAX: f64 = 0.05;
const NEO_OLS_MIN: f64 = 1.0;
const BREAKDOWN_SR_MAX: f64 = 0.6;
const BREAKDOWN_OLS_MIN: f64 = 4.0;
const EQUIV_Y_MAX: f64 = 0.02;
const EQUIV_X_MAX: f64 = 0.005;
const EQUIV_OLS_MAX: f64 = 1e-8;

// Criterion 8.
const SPD_DATASETS: usize = 1000;
const REFIT_TOL: f64 = 1e-10;
const QUANTILE_ROUNDTRIP_TOL: f64 = 1e-9;

struct Outcome {
    pass: bool,
    detail: String,
}

type Check = fn() -> Result<Outcome, String>;

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn limit(secs: u64) -> Duration {
    Duration::from_secs(secs)
}

fn star() -> Result<Outcome, String> {
    let data = builtin_dataset("star").map_err(|e| e.to_string())?.data;
    let sr = sr_fit(&data).map_err(|e| e.to_string())?;
    let ols = ols_fit(&data).map_err(|e| e.to_string())?;
    let flagged: Vec<usize> = sr.outliers.iter().map(|i| i + 1).collect();
    let checks = [
        ("outliers", flagged == STAR_OUTLIERS),
        ("ols alpha", within(ols.alpha, STAR_OLS.0, STAR_OLS_TOL)),
        ("ols beta", within(ols.beta[0], STAR_OLS.1, STAR_OLS_TOL)),
        ("ols r2", within(ols.r2, STAR_OLS_R2, STAR_OLS_R2_TOL)),
        ("sr r2", within(sr.r2, STAR_SR_R2, STAR_SR_R2_TOL)),
        (
            "sr alpha",
            within(sr.alpha, STAR_SR_COEF.0, STAR_SR_COEF_TOL),
        ),
        (
            "sr beta",
            within(sr.beta[0], STAR_SR_COEF.1, STAR_SR_COEF_TOL),
        ),
    ];
    Ok(Outcome {
        pass: checks.iter().all(|c| c.1),
        detail: format!(
            "outliers {flagged:?}; OLS ({:.4}, {:.4}) R2 {:.4}; SR ({:.4}, {:.4}) R2 {:.4}{}",
            ols.alpha,
            ols.beta[0],
            ols.r2,
            sr.alpha,
            sr.beta[0],
            sr.r2,
            failed_clauses(&checks)
        ),
    })
}

fn hbk() -> Result<Outcome, String> {
    let data = builtin_dataset("hbk").map_err(|e| e.to_string())?.data;
    let sr = sr_fit(&data).map_err(|e| e.to_string())?;
    let flagged: Vec<usize> = sr.outliers.iter().map(|i| i + 1).collect();
    let checks = [
        ("1-10 flagged", (1..=10).all(|i| flagged.contains(&i))),
        ("11-14 clean", (11..=14).all(|i| !flagged.contains(&i))),
        ("exact set", flagged == (1..=10).collect::<Vec<_>>()),
        (
            "adjusted r2",
            within(sr.adjusted_r2, HBK_ADJ_R2, HBK_ADJ_R2_TOL),
        ),
    ];
    Ok(Outcome {
        pass: checks.iter().all(|c| c.1),
        detail: format!(
            "outliers {flagged:?}; adjusted R2 {:.4}{}",
            sr.adjusted_r2,
            failed_clauses(&checks)
        ),
    })
}

fn clean_efficiency() -> Result<Outcome, String> {
    let cfg = ScenarioConfig::clean(Scenario::Ne, 5, 100, 200, SEED);
    let e = efficiency(&cfg, Method::Sr, &RunOptions::default()).map_err(|e| e.to_string())?;
    Ok(Outcome {
        pass: e.valid && (EFFICIENCY_RANGE.0..=EFFICIENCY_RANGE.1).contains(&e.efficiency),
        detail: format!(
            "Eff(SR) = {:.4} (target [{}, {}]), failures {}",
            e.efficiency, EFFICIENCY_RANGE.0, EFFICIENCY_RANGE.1, e.failures
        ),
    })
}

fn heavy_tails() -> Result<Outcome, String> {
    let cfg = ScenarioConfig::clean(Scenario::Te, 5, 100, 200, SEED);
    let t = mse_table(&cfg, &[Method::Sr, Method::Ols], &RunOptions::default())
        .map_err(|e| e.to_string())?;
    let sr = t
        .cell(Method::Sr, 0.0, 0.0)
        .ok_or("missing SR cell")?
        .mse_beta;
    let ols = t
        .cell(Method::Ols, 0.0, 0.0)
        .ok_or("missing OLS cell")?
        .mse_beta;
    Ok(Outcome {
        pass: t.valid && (TE_MSE_RANGE.0..=TE_MSE_RANGE.1).contains(&sr),
        detail: format!(
            "MSE(SR) = {sr:.4} (target [{}, {}]), MSE(OLS) = {ols:.4}",
            TE_MSE_RANGE.0, TE_MSE_RANGE.1
        ),
    })
}

fn robustness_sweep() -> Result<Outcome, String> {
    let cfg = ScenarioConfig::contaminated(5, 100, 100, 0.10, integer_grid(), integer_grid(), SEED);
    let t = mse_table(&cfg, &[Method::Sr, Method::Ols], &RunOptions::default())
        .map_err(|e| e.to_string())?;
    let sr = t.rollup(Method::Sr).ok_or("missing SR")?.mmmse_beta;
    let ols = t.rollup(Method::Ols).ok_or("missing OLS")?.mmmse_beta;
    Ok(Outcome {
        pass: t.valid && sr <= NEO_SR_MAX && ols >= NEO_OLS_MIN,
        detail: format!(
            "MMMSE(SR) = {sr:.4} (<= {NEO_SR_MAX}), MMMSE(OLS) = {ols:.4} (>= {NEO_OLS_MIN})"
        ),
    })
}

fn breakdown() -> Result<Outcome, String> {
    let cfg = ScenarioConfig::contaminated(5, 100, 100, 0.45, refined_grid(), refined_grid(), SEED);
    let t = breakdown_run(&cfg, &RunOptions::default()).map_err(|e| e.to_string())?;
    let sr = t.rollup(Method::Sr).ok_or("missing SR")?.mmmse_beta;
    let ols = t.rollup(Method::Ols).ok_or("missing OLS")?.mmmse_beta;
    Ok(Outcome {
        pass: t.valid && sr <= BREAKDOWN_SR_MAX && ols >= BREAKDOWN_OLS_MIN,
        detail: format!(
            "MMMSE(SR) = {sr:.4} (<= {BREAKDOWN_SR_MAX}), MMMSE(OLS) = {ols:.4} (>= {BREAKDOWN_OLS_MIN})"
        ),
    })
}

fn equivariance() -> Result<Outcome, String> {
    let cfg = ScenarioConfig::contaminated(5, 100, 200, 0.0, integer_grid(), integer_grid(), SEED);
    let opts = RunOptions::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for (kind, bound) in [
        (TransformKind::RegressionY, EQUIV_Y_MAX),
        (TransformKind::X, EQUIV_X_MAX),
    ] {
        let t = equivariance_run(&cfg, kind, &[Method::Sr, Method::Ols], &opts)
            .map_err(|e| e.to_string())?;
        let sr = t.rollup(Method::Sr).ok_or("missing SR")?.max_mmse;
        let ols = t.rollup(Method::Ols).ok_or("missing OLS")?.max_mmse;
        pass &= t.valid && sr <= bound && ols <= EQUIV_OLS_MAX;
        let label = match kind {
            TransformKind::RegressionY => "regression/y",
            TransformKind::X => "x",
        };
        parts.push(format!(
            "{label}: SR {sr:.4} (<= {bound}), OLS {ols:.1e} (<= {EQUIV_OLS_MAX:.0e})"
        ));
    }
    Ok(Outcome {
        pass,
        detail: parts.join("; "),
    })
}

/// Random nondegenerate datasets of varying shape, some contaminated.
fn property_datasets(count: usize) -> Result<Vec<Data>, String> {
    (0..count)
        .map(|i| {
            let p = 1 + i % 6;
            let n = p + 2 + (i * 7) % 60;
            let delta = [0.0, 0.1, 0.3][i % 3];
            let cfg = ScenarioConfig::contaminated(p, n, 1, delta, vec![3.0], vec![4.0], i as u64);
            generate(&cfg, 0, 3.0, 4.0).map_err(|e| e.to_string())
        })
        .collect()
}

fn properties() -> Result<Outcome, String> {
    let datasets = property_datasets(SPD_DATASETS)?;
    let mut failures: Vec<String> = Vec::new();

    let mut not_spd = 0;
    for d in &datasets {
        let z = d.joint();
        let ok = shrinkage_mean(&z)
            .and_then(|loc| shrinkage_scatter(&z, &loc))
            .and_then(|s| Cholesky::factor(&s.matrix))
            .is_ok();
        not_spd += usize::from(!ok);
    }
    if not_spd > 0 {
        failures.push(format!("{not_spd} scatters not SPD"));
    }

    let mut worst_refit = 0.0_f64;
    let mut refits = 0;
    for d in datasets.iter().filter(|d| d.n() >= 3 * (d.p() + 2)) {
        let Ok(fit) = sr_fit(d) else { continue };
        let keep: Vec<usize> = (0..d.n()).filter(|&i| fit.wr[i]).collect();
        let ls =
            ols_fit(&d.select(&keep).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        for (a, b) in fit.params().iter().zip(ls.params()) {
            worst_refit = worst_refit.max((a - b).abs() / b.abs().max(1.0));
        }
        refits += 1;
    }
    if worst_refit > REFIT_TOL {
        failures.push(format!("refit identity off by {worst_refit:.1e}"));
    }

    let mut increases = 0;
    for d in datasets.iter().take(200) {
        let z = d.joint();
        let mut y = coordinatewise_median(&z).map_err(|e| e.to_string())?;
        let mut f = l1_objective(&z, &y);
        for _ in 0..50 {
            match weiszfeld_step(&z, &y) {
                WeiszfeldStep::Moved(next) => {
                    let g = l1_objective(&z, &next);
                    if g > f * (1.0 + 1e-12) {
                        increases += 1;
                    }
                    y = next;
                    f = g;
                }
                WeiszfeldStep::Optimal => break,
            }
        }
    }
    if increases > 0 {
        failures.push(format!(
            "{increases} Weiszfeld steps increased the objective"
        ));
    }

    let mut worst_quantile = 0.0_f64;
    for dof in 1..=30 {
        for prob in [
            1e-6, 0.001, 0.01, 0.025, 0.1, 0.25, 0.5, 0.75, 0.9, 0.975, 0.99, 0.999, 0.999999,
        ] {
            let x = chisq_quantile(dof, prob).map_err(|e| e.to_string())?;
            worst_quantile = worst_quantile.max((chisq_cdf(dof, x) - prob).abs());
        }
    }
    if worst_quantile > QUANTILE_ROUNDTRIP_TOL {
        failures.push(format!("quantile round trip off by {worst_quantile:.1e}"));
    }

    let cfg = ScenarioConfig::contaminated(3, 50, 40, 0.2, vec![0.0, 5.0], vec![0.0, 5.0], SEED);
    let mut outputs = Vec::new();
    for threads in [1, 2, 4] {
        let opts = RunOptions {
            threads,
            ..RunOptions::default()
        };
        let t = mse_table(&cfg, &[Method::Sr, Method::Ols], &opts).map_err(|e| e.to_string())?;
        let mut csv = Vec::new();
        write_metrics_csv(&t.cells, &mut csv).map_err(|e| e.to_string())?;
        outputs.push(csv);
    }
    let deterministic = outputs.windows(2).all(|w| w[0] == w[1]);
    if !deterministic {
        failures.push("simulation output depends on thread count".into());
    }

    Ok(Outcome {
        pass: failures.is_empty(),
        detail: format!(
            "{SPD_DATASETS} scatters SPD-checked, {refits} refits (max rel dev {worst_refit:.1e}), \
             quantile round trip {worst_quantile:.1e}, thread-count determinism {}{}",
            if deterministic { "ok" } else { "broken" },
            if failures.is_empty() {
                String::new()
            } else {
                format!("; failed: {}", failures.join(", "))
            }
        ),
    })
}

fn failed_clauses(checks: &[(&str, bool)]) -> String {
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    if failed.is_empty() {
        String::new()
    } else {
        format!("; failed: {}", failed.join(", "))
    }
}

fn main() {
    let criteria: [(&str, Check, Duration); 8] = [
        ("star dataset golden fit", star, limit(1)),
        ("HBK dataset golden fit", hbk, limit(1)),
        (
            "efficiency under normal errors",
            clean_efficiency,
            limit(120),
        ),
        ("MSE under t3 errors", heavy_tails, limit(120)),
        (
            "robustness sweep at 10% contamination",
            robustness_sweep,
            limit(900),
        ),
        ("breakdown at 45% contamination", breakdown, limit(900)),
        ("empirical equivariance", equivariance, limit(300)),
        ("property suite", properties, limit(120)),
    ];
    let mut passed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (o.pass && elapsed <= *budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let timing = if elapsed > *budget {
            format!(
                "{:.2}s, over the {}s budget",
                elapsed.as_secs_f64(),
                budget.as_secs()
            )
        } else {
            format!("{:.2}s", elapsed.as_secs_f64())
        };
        println!(
            "{} criterion {} {name} [{timing}]: {detail}",
            if pass { "PASS" } else { "FAIL" },
            i + 1
        );
        passed += usize::from(pass);
    }
    println!("acceptance: {passed}/{} criteria passed", criteria.len());
    if passed != criteria.len() {
        std::process::exit(1);
    }
}
