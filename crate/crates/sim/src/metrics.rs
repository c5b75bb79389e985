//! Monte-Carlo error summaries against the zero truth.
//!
//! With `β = 0` and `α = 0`, for `M` replicate estimates:
//! `mse_beta = (1/M) Σ ‖β̂‖² / p`, `bias2_beta = ‖(1/M) Σ β̂‖² / p`, and the
//! same without the `1/p` for the intercept. Rollups take maxima over `k`
//! for each `lambda`, then over `lambda`.

use serde::Serialize;

/// Running sums for one `(method, lambda, k)` cell, added in replicate order.
#[derive(Debug, Clone, PartialEq)]
pub struct Accumulator {
    sum_beta: Vec<f64>,
    sum_sq_beta: f64,
    sum_alpha: f64,
    sum_sq_alpha: f64,
    count: usize,
}

impl Accumulator {
    pub fn new(p: usize) -> Self {
        Self {
            sum_beta: vec![0.0; p],
            sum_sq_beta: 0.0,
            sum_alpha: 0.0,
            sum_sq_alpha: 0.0,
            count: 0,
        }
    }

    /// Adds one estimate `(β̂, α̂)` stacked as a single vector.
    pub fn push(&mut self, params: &[f64]) {
        let p = self.sum_beta.len();
        for (s, &b) in self.sum_beta.iter_mut().zip(&params[..p]) {
            *s += b;
            self.sum_sq_beta += b * b;
        }
        let a = params[p];
        self.sum_alpha += a;
        self.sum_sq_alpha += a * a;
        self.count += 1;
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mse_beta(&self) -> f64 {
        self.sum_sq_beta / (self.count as f64 * self.sum_beta.len() as f64)
    }

    pub fn bias2_beta(&self) -> f64 {
        let m = self.count as f64;
        self.sum_beta.iter().map(|s| (s / m).powi(2)).sum::<f64>() / self.sum_beta.len() as f64
    }

    pub fn mse_alpha(&self) -> f64 {
        self.sum_sq_alpha / self.count as f64
    }

    pub fn bias2_alpha(&self) -> f64 {
        (self.sum_alpha / self.count as f64).powi(2)
    }

    /// Mean squared error of the whole parameter vector, `(1/M) Σ ‖φ̂‖²`.
    pub fn mse_params(&self) -> f64 {
        (self.sum_sq_beta + self.sum_sq_alpha) / self.count as f64
    }
}

/// One row of the metrics table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsCell {
    pub method: String,
    pub scenario: String,
    pub p: usize,
    pub n: usize,
    pub delta: f64,
    pub lambda: f64,
    pub k: f64,
    pub mse_beta: f64,
    pub mse_alpha: f64,
    pub bias2_beta: f64,
    pub bias2_alpha: f64,
    /// Replicates that entered the averages.
    pub replicates: usize,
    pub failures: usize,
}

/// Maxima over `k` at one `lambda`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaRollup {
    pub lambda: f64,
    pub mmse_beta: f64,
    pub mbias_beta: f64,
    pub mmse_alpha: f64,
    pub mbias_alpha: f64,
}

/// Per-method rollups: maxima over `k` for each `lambda`, then over `lambda`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodRollup {
    pub method: String,
    pub by_lambda: Vec<LambdaRollup>,
    pub mmmse_beta: f64,
    pub mmbias_beta: f64,
    pub mmmse_alpha: f64,
    pub mmbias_alpha: f64,
}

/// Rollups for one method from its cells (in any order).
pub fn rollup(method: &str, cells: &[MetricsCell]) -> MethodRollup {
    let mut by_lambda: Vec<LambdaRollup> = Vec::new();
    for c in cells.iter().filter(|c| c.method == method) {
        match by_lambda.iter_mut().find(|r| r.lambda == c.lambda) {
            Some(r) => {
                r.mmse_beta = r.mmse_beta.max(c.mse_beta);
                r.mbias_beta = r.mbias_beta.max(c.bias2_beta);
                r.mmse_alpha = r.mmse_alpha.max(c.mse_alpha);
                r.mbias_alpha = r.mbias_alpha.max(c.bias2_alpha);
            }
            None => by_lambda.push(LambdaRollup {
                lambda: c.lambda,
                mmse_beta: c.mse_beta,
                mbias_beta: c.bias2_beta,
                mmse_alpha: c.mse_alpha,
                mbias_alpha: c.bias2_alpha,
            }),
        }
    }
    let max = |f: fn(&LambdaRollup) -> f64| by_lambda.iter().map(f).fold(f64::NAN, f64::max);
    MethodRollup {
        method: method.to_string(),
        mmmse_beta: max(|r| r.mmse_beta),
        mmbias_beta: max(|r| r.mbias_beta),
        mmmse_alpha: max(|r| r.mmse_alpha),
        mmbias_alpha: max(|r| r.mbias_alpha),
        by_lambda,
    }
}
