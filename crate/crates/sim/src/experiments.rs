//! Replicated experiments. Replicates run in parallel; results are collected
//! in replicate order and reduced sequentially, so every number is identical
//! for any worker count.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use shrinkreg::regression::{ols_fit, sr_fit_with, sw_fit_with};
use shrinkreg::{Data, Method, SrConfig};

use crate::error::{Result, SimError};
use crate::generate::{replicate_rng, ReplicateDraw};
use crate::metrics::{rollup, Accumulator, MethodRollup, MetricsCell};
use crate::scenario::{Scenario, ScenarioConfig};
use crate::transform::{Transform, TransformKind};

/// A run is flagged invalid when more than this fraction of replicates fail
/// in any cell.
pub const MAX_FAILURE_RATE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunOptions {
    /// Worker threads; 0 uses the global default.
    pub threads: usize,
    pub sr: SrConfig,
}

/// `(β̂, α̂)` of `method` on `data`.
pub fn fit_params(method: Method, data: &Data, sr: &SrConfig) -> shrinkreg::Result<Vec<f64>> {
    let fit = match method {
        Method::Ols => ols_fit(data)?,
        Method::Sw => sw_fit_with(data, sr)?,
        Method::Sr => sr_fit_with(data, sr)?,
    };
    Ok(fit.params())
}

fn run_replicates<R, F>(m: usize, threads: usize, f: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(usize) -> Result<R> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| SimError::Pool(e.to_string()))?;
    pool.install(|| (0..m).into_par_iter().map(&f).collect())
}

/// Evaluates `f` on every cell. Without contaminated rows all cells share
/// one dataset, so the first result is reused.
fn per_cell<R: Clone>(
    draw: &ReplicateDraw,
    cells: &[(f64, f64)],
    f: impl Fn(&(f64, f64)) -> R,
) -> Vec<R> {
    if draw.contaminated().is_empty() {
        vec![f(&cells[0]); cells.len()]
    } else {
        cells.iter().map(f).collect()
    }
}

fn check(config: &ScenarioConfig, opts: &RunOptions, methods: &[Method]) -> Result<()> {
    config.validate()?;
    opts.sr.validate()?;
    if methods.is_empty() {
        return Err(SimError::InvalidConfig("no methods selected".into()));
    }
    Ok(())
}

fn too_many_failures(failures: usize, m: usize) -> bool {
    failures as f64 > MAX_FAILURE_RATE * m as f64
}

/// Per-cell accumulators, one per method, plus the failed replicate count.
struct CellSums {
    sums: Vec<Accumulator>,
    failures: usize,
}

fn accumulate(
    config: &ScenarioConfig,
    methods: &[Method],
    opts: &RunOptions,
) -> Result<Vec<CellSums>> {
    check(config, opts, methods)?;
    let cells = config.cells();
    let outcomes = run_replicates(config.m, opts.threads, |r| {
        let mut rng = replicate_rng(config.seed, r);
        let draw = ReplicateDraw::new(config, &mut rng)?;
        let fit_cell = |&(lambda, k): &(f64, f64)| -> Option<Vec<Vec<f64>>> {
            let data = draw.dataset(lambda, k).ok()?;
            methods
                .iter()
                .map(|&m| fit_params(m, &data, &opts.sr).ok())
                .collect()
        };
        Ok(per_cell(&draw, &cells, fit_cell))
    })?;
    Ok((0..cells.len())
        .map(|ci| {
            let mut sums = vec![Accumulator::new(config.p); methods.len()];
            let mut failures = 0;
            for rep in &outcomes {
                match &rep[ci] {
                    Some(params) => {
                        for (acc, v) in sums.iter_mut().zip(params) {
                            acc.push(v);
                        }
                    }
                    None => failures += 1,
                }
            }
            CellSums { sums, failures }
        })
        .collect())
}

/// Metrics for every `(method, lambda, k)` cell with rollups.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsTable {
    pub config: ScenarioConfig,
    pub delta1: f64,
    pub delta2: f64,
    pub methods: Vec<String>,
    pub cells: Vec<MetricsCell>,
    pub rollups: Vec<MethodRollup>,
    pub failures: usize,
    pub valid: bool,
}

impl MetricsTable {
    pub fn rollup(&self, method: Method) -> Option<&MethodRollup> {
        self.rollups.iter().find(|r| r.method == method.as_str())
    }

    /// `MSE(OLS) / MSE(method)` of the full parameter vector in the first
    /// cell; both methods must be in the table.
    pub fn efficiency(&self, method: Method) -> Option<f64> {
        let (l, k) = self.config.cells()[0];
        let p = self.config.p as f64;
        let mse = |c: &MetricsCell| p * c.mse_beta + c.mse_alpha;
        Some(mse(self.cell(Method::Ols, l, k)?) / mse(self.cell(method, l, k)?))
    }

    pub fn cell(&self, method: Method, lambda: f64, k: f64) -> Option<&MetricsCell> {
        self.cells
            .iter()
            .find(|c| c.method == method.as_str() && c.lambda == lambda && c.k == k)
    }
}

pub fn mse_table(
    config: &ScenarioConfig,
    methods: &[Method],
    opts: &RunOptions,
) -> Result<MetricsTable> {
    let sums = accumulate(config, methods, opts)?;
    let mut cells = Vec::new();
    let mut failures = 0;
    let mut valid = true;
    for (&(lambda, k), cell) in config.cells().iter().zip(&sums) {
        failures += cell.failures;
        valid &= !too_many_failures(cell.failures, config.m);
        for (method, acc) in methods.iter().zip(&cell.sums) {
            cells.push(MetricsCell {
                method: method.to_string(),
                scenario: config.scenario.as_str().to_string(),
                p: config.p,
                n: config.n,
                delta: config.delta,
                lambda,
                k,
                mse_beta: acc.mse_beta(),
                mse_alpha: acc.mse_alpha(),
                bias2_beta: acc.bias2_beta(),
                bias2_alpha: acc.bias2_alpha(),
                replicates: acc.count(),
                failures: cell.failures,
            });
        }
    }
    let rollups = methods.iter().map(|m| rollup(m.as_str(), &cells)).collect();
    Ok(MetricsTable {
        config: config.clone(),
        delta1: opts.sr.delta1,
        delta2: opts.sr.delta2,
        methods: methods.iter().map(|m| m.to_string()).collect(),
        cells,
        rollups,
        failures,
        valid,
    })
}

/// High-contamination sweep of SR against least squares.
pub fn breakdown_run(config: &ScenarioConfig, opts: &RunOptions) -> Result<MetricsTable> {
    if config.scenario != Scenario::Neo {
        return Err(SimError::InvalidConfig(
            "breakdown runs use the contaminated scenario".into(),
        ));
    }
    mse_table(config, &[Method::Sr, Method::Ols], opts)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfficiencyResult {
    pub config: ScenarioConfig,
    pub method: String,
    /// `MSE(OLS) / MSE(method)` of the full parameter vector.
    pub efficiency: f64,
    pub mse_params_ols: f64,
    pub mse_params_method: f64,
    pub replicates: usize,
    pub failures: usize,
    pub valid: bool,
}

/// Relative efficiency of `method` against least squares on shared data.
pub fn efficiency(
    config: &ScenarioConfig,
    method: Method,
    opts: &RunOptions,
) -> Result<EfficiencyResult> {
    let sums = accumulate(config, &[Method::Ols, method], opts)?;
    let cell = &sums[0];
    let (ols, other) = (&cell.sums[0], &cell.sums[1]);
    Ok(EfficiencyResult {
        config: config.clone(),
        method: method.to_string(),
        efficiency: ols.mse_params() / other.mse_params(),
        mse_params_ols: ols.mse_params(),
        mse_params_method: other.mse_params(),
        replicates: ols.count(),
        failures: cell.failures,
        valid: !too_many_failures(cell.failures, config.m),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivarianceCell {
    pub method: String,
    pub lambda: f64,
    pub k: f64,
    /// Mean over replicates of `‖φ̂(transformed) − predicted‖² / (p + 1)`.
    pub mse_deviation: f64,
    pub max_deviation: f64,
    pub replicates: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivarianceRollup {
    pub method: String,
    pub by_lambda: Vec<LambdaDeviation>,
    pub max_mmse: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaDeviation {
    pub lambda: f64,
    /// Maximum over the k grid of the mean squared deviation.
    pub mmse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivarianceTable {
    pub config: ScenarioConfig,
    pub transform: TransformKind,
    pub delta1: f64,
    pub delta2: f64,
    pub cells: Vec<EquivarianceCell>,
    pub rollups: Vec<EquivarianceRollup>,
    pub valid: bool,
}

impl EquivarianceTable {
    pub fn rollup(&self, method: Method) -> Option<&EquivarianceRollup> {
        self.rollups.iter().find(|r| r.method == method.as_str())
    }
}

/// Fits each replicate before and after a random transformation and records
/// how far the refit lands from the exactly equivariant prediction. The
/// transformation is drawn once per replicate, after its data.
pub fn equivariance_run(
    config: &ScenarioConfig,
    kind: TransformKind,
    methods: &[Method],
    opts: &RunOptions,
) -> Result<EquivarianceTable> {
    check(config, opts, methods)?;
    let cells = config.cells();
    let p = config.p;
    let outcomes = run_replicates(config.m, opts.threads, |r| {
        let mut rng = replicate_rng(config.seed, r);
        let draw = ReplicateDraw::new(config, &mut rng)?;
        let transform = Transform::draw(kind, p, &mut rng);
        let fit_cell = |&(lambda, k): &(f64, f64)| -> Vec<Option<f64>> {
            let data = draw.dataset(lambda, k).ok();
            let moved = data.as_ref().and_then(|d| transform.apply(d).ok());
            methods
                .iter()
                .map(|&m| {
                    let before = fit_params(m, data.as_ref()?, &opts.sr).ok()?;
                    let after = fit_params(m, moved.as_ref()?, &opts.sr).ok()?;
                    let predicted = transform.predict(&before);
                    let dev = after
                        .iter()
                        .zip(&predicted)
                        .map(|(a, b)| (a - b).powi(2))
                        .sum::<f64>();
                    Some(dev / (p + 1) as f64)
                })
                .collect()
        };
        Ok(per_cell(&draw, &cells, fit_cell))
    })?;

    let mut out = Vec::new();
    let mut valid = true;
    for (ci, &(lambda, k)) in cells.iter().enumerate() {
        for (mi, method) in methods.iter().enumerate() {
            let (mut sum, mut max, mut count, mut failures) = (0.0, 0.0f64, 0usize, 0usize);
            for rep in &outcomes {
                match rep[ci][mi] {
                    Some(d) => {
                        sum += d;
                        max = max.max(d);
                        count += 1;
                    }
                    None => failures += 1,
                }
            }
            valid &= !too_many_failures(failures, config.m);
            out.push(EquivarianceCell {
                method: method.to_string(),
                lambda,
                k,
                mse_deviation: sum / count as f64,
                max_deviation: max,
                replicates: count,
                failures,
            });
        }
    }
    let rollups = methods
        .iter()
        .map(|m| {
            let mut by_lambda: Vec<LambdaDeviation> = Vec::new();
            for c in out.iter().filter(|c| c.method == m.as_str()) {
                match by_lambda.iter_mut().find(|e| e.lambda == c.lambda) {
                    Some(e) => e.mmse = e.mmse.max(c.mse_deviation),
                    None => by_lambda.push(LambdaDeviation {
                        lambda: c.lambda,
                        mmse: c.mse_deviation,
                    }),
                }
            }
            let max_mmse = by_lambda.iter().map(|e| e.mmse).fold(f64::NAN, f64::max);
            EquivarianceRollup {
                method: m.to_string(),
                by_lambda,
                max_mmse,
            }
        })
        .collect();
    Ok(EquivarianceTable {
        config: config.clone(),
        transform: kind,
        delta1: opts.sr.delta1,
        delta2: opts.sr.delta2,
        cells: out,
        rollups,
        valid,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingResult {
    pub method: String,
    pub seconds_per_fit: f64,
    pub fits: usize,
}

/// Mean wall-clock seconds per fit, measured sequentially on the first cell
/// of the configuration.
pub fn timing_run(
    config: &ScenarioConfig,
    methods: &[Method],
    opts: &RunOptions,
) -> Result<Vec<TimingResult>> {
    check(config, opts, methods)?;
    let (lambda, k) = config.cells()[0];
    let mut totals = vec![0.0; methods.len()];
    for r in 0..config.m {
        let mut rng = replicate_rng(config.seed, r);
        let data = ReplicateDraw::new(config, &mut rng)?.dataset(lambda, k)?;
        for (total, &m) in totals.iter_mut().zip(methods) {
            let start = Instant::now();
            let _ = std::hint::black_box(fit_params(m, &data, &opts.sr));
            *total += start.elapsed().as_secs_f64();
        }
    }
    Ok(methods
        .iter()
        .zip(totals)
        .map(|(m, t)| TimingResult {
            method: m.to_string(),
            seconds_per_fit: t / config.m as f64,
            fits: config.m,
        })
        .collect())
}
