//! Least squares and the shrinkage reweighted (SR) estimator.
//!
//! SR runs in three steps on the joint sample `zᵢ = (xᵢ, yᵢ)`:
//!
//! 1. robust squared Mahalanobis distances from the shrinkage location and
//!    scatter; rows beyond the `χ²_{p+1}` cutoff get weight 0;
//! 2. the weighted (SW) mean and covariance of the retained rows give an
//!    interim fit and residual scale; rows whose standardized squared
//!    residual exceeds the `χ²_1` cutoff get residual weight 0;
//! 3. least squares on the rows with residual weight 1.

use std::fmt;

use crate::dataset::Dataset;
use crate::error::{Error, FitStage, Result};
use crate::matrix::{Matrix, SymMatrix};
use crate::numerics::{chisq_quantile, Cholesky};
use crate::scalar::Scalar;
use crate::shrinkage::{
    shrinkage_mean, shrinkage_scatter_with_rule, IntensityRule, ShrinkageLocation, ShrinkageScatter,
};

/// Lower bound on the interim residual scale, so exact fits reject nothing.
pub const SIGMA2_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Ols,
    Sw,
    Sr,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Ols => "OLS",
            Method::Sw => "SW",
            Method::Sr => "SR",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Tuning of the two rejection stages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SrConfig {
    /// Upper-tail probability of the `χ²_{p+1}` cutoff on joint distances.
    pub delta1: f64,
    /// Upper-tail probability of the `χ²_1` cutoff on standardized residuals.
    pub delta2: f64,
    pub intensity: IntensityRule,
}

impl Default for SrConfig {
    fn default() -> Self {
        Self {
            delta1: 0.025,
            delta2: 0.01,
            intensity: IntensityRule::default(),
        }
    }
}

impl SrConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("delta1", self.delta1), ("delta2", self.delta2)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Validation(format!(
                    "{name} must lie in (0, 1), got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn joint_cutoff(&self, p: usize) -> Result<f64> {
        chisq_quantile(p as u32 + 1, 1.0 - self.delta1)
    }

    pub fn residual_cutoff(&self) -> Result<f64> {
        chisq_quantile(1, 1.0 - self.delta2)
    }
}

/// Intermediate quantities of an SR fit.
#[derive(Debug, Clone, PartialEq)]
pub struct SrDiagnostics<T> {
    /// Robust squared distances `d²(zᵢ)`.
    pub distances: Vec<T>,
    pub joint_cutoff: f64,
    /// Standardized squared interim residuals `rᵢ² / σ̂²_SW`.
    pub residual_distances: Vec<T>,
    pub residual_cutoff: f64,
    pub location_eta: T,
    pub scatter_eta: T,
    pub l1_converged: bool,
    pub sw_beta: Vec<T>,
    pub sw_alpha: T,
    pub sw_sigma2: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionFit<T> {
    pub beta: Vec<T>,
    pub alpha: T,
    pub sigma2: T,
    /// First-stage (joint distance) weights.
    pub w: Vec<bool>,
    /// Residual weights; the final fit uses exactly these rows.
    pub wr: Vec<bool>,
    /// Zero-based indices with `wr == false`, ascending.
    pub outliers: Vec<usize>,
    pub r2: T,
    pub adjusted_r2: T,
    pub method: Method,
    pub diagnostics: Option<SrDiagnostics<T>>,
}

impl<T: Scalar> RegressionFit<T> {
    /// `(β, α)` stacked as one parameter vector.
    pub fn params(&self) -> Vec<T> {
        let mut v = self.beta.clone();
        v.push(self.alpha);
        v
    }

    pub fn residuals(&self, data: &Dataset<T>) -> Vec<T> {
        residuals(data, &self.beta, self.alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RSquared<T> {
    pub r2: T,
    pub adjusted: T,
}

/// Least squares from the sample moments: `β = Sxx⁻¹ Sxy`, `α = ȳ − βᵗx̄`.
///
/// `sigma2` is the mean squared residual (divisor `n`).
pub fn ols_fit<T: Scalar>(data: &Dataset<T>) -> Result<RegressionFit<T>> {
    let all = vec![true; data.n()];
    let (beta, alpha) = ls_on_rows(data, &all, FitStage::Moments)?;
    Ok(finish(
        data,
        beta,
        alpha,
        all.clone(),
        all,
        Method::Ols,
        None,
    ))
}

/// Shrinkage location and scatter of the joint sample with the distances
/// they induce.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistances<T> {
    pub distances: Vec<T>,
    pub location: ShrinkageLocation<T>,
    pub scatter: ShrinkageScatter<T>,
}

/// `d²(zᵢ) = (zᵢ − μ)ᵗ Σ⁻¹ (zᵢ − μ)` with the shrinkage location and scatter.
pub fn initial_distances<T: Scalar>(
    data: &Dataset<T>,
    rule: IntensityRule,
) -> Result<JointDistances<T>> {
    let z = data.joint();
    let location = shrinkage_mean(&z)?;
    let scatter = shrinkage_scatter_with_rule(&z, &location, rule)?;
    let distances = mahalanobis2(&z, &location.center, &scatter.matrix)?;
    Ok(JointDistances {
        distances,
        location,
        scatter,
    })
}

/// Squared Mahalanobis distance of every row of `z`.
pub fn mahalanobis2<T: Scalar>(
    z: &Matrix<T>,
    center: &[T],
    scatter: &SymMatrix<T>,
) -> Result<Vec<T>> {
    let chol = Cholesky::factor(scatter)?;
    let mut diff = vec![T::zero(); center.len()];
    z.rows()
        .map(|row| {
            for ((d, &a), &c) in diff.iter_mut().zip(row).zip(center) {
                *d = a - c;
            }
            chol.inv_quad_form(&diff).map(|q| q.max(T::zero()))
        })
        .collect()
}

/// Weighted joint moments after the first rejection stage.
#[derive(Debug, Clone, PartialEq)]
pub struct SwEstimates<T> {
    pub location: Vec<T>,
    /// Covariance of the retained rows, normalized by their count.
    pub scatter: SymMatrix<T>,
    pub w: Vec<bool>,
    pub initial: JointDistances<T>,
    pub cutoff: f64,
}

pub fn sw_estimates<T: Scalar>(data: &Dataset<T>, config: &SrConfig) -> Result<SwEstimates<T>> {
    config.validate()?;
    let initial = initial_distances(data, config.intensity)?;
    let cutoff = config.joint_cutoff(data.p())?;
    let q = T::lit(cutoff);
    let w: Vec<bool> = initial.distances.iter().map(|&d| d <= q).collect();
    check_retained(&w, data.p())?;
    let (location, scatter) = weighted_moments(&data.joint(), &w)?;
    Ok(SwEstimates {
        location,
        scatter,
        w,
        initial,
        cutoff,
    })
}

/// Interim fit from the partitioned SW moments.
pub fn sw_fit<T: Scalar>(data: &Dataset<T>) -> Result<RegressionFit<T>> {
    sw_fit_with(data, &SrConfig::default())
}

pub fn sw_fit_with<T: Scalar>(data: &Dataset<T>, config: &SrConfig) -> Result<RegressionFit<T>> {
    let sw = sw_estimates(data, config)?;
    let (beta, alpha, sigma2) = sw_regression(&sw, data.p())?;
    let mut fit = finish(data, beta, alpha, sw.w.clone(), sw.w, Method::Sw, None);
    fit.sigma2 = sigma2;
    Ok(fit)
}

/// Shrinkage reweighted fit with the default quantile levels.
pub fn sr_fit<T: Scalar>(data: &Dataset<T>) -> Result<RegressionFit<T>> {
    sr_fit_with(data, &SrConfig::default())
}

pub fn sr_fit_with<T: Scalar>(data: &Dataset<T>, config: &SrConfig) -> Result<RegressionFit<T>> {
    let sw = sw_estimates(data, config)?;
    let p = data.p();
    let (sw_beta, sw_alpha, sw_sigma2) = sw_regression(&sw, p)?;

    let residual_cutoff = config.residual_cutoff()?;
    let q = T::lit(residual_cutoff);
    let residual_distances: Vec<T> = residuals(data, &sw_beta, sw_alpha)
        .into_iter()
        .map(|r| r * r / sw_sigma2)
        .collect();
    let wr: Vec<bool> = residual_distances.iter().map(|&d| d <= q).collect();
    check_retained(&wr, p)?;
    let (beta, alpha) = ls_on_rows(data, &wr, FitStage::AfterReweighting)?;

    let diagnostics = SrDiagnostics {
        distances: sw.initial.distances,
        joint_cutoff: sw.cutoff,
        residual_distances,
        residual_cutoff,
        location_eta: sw.initial.location.eta,
        scatter_eta: sw.initial.scatter.eta,
        l1_converged: sw.initial.location.converged,
        sw_beta,
        sw_alpha,
        sw_sigma2,
    };
    Ok(finish(
        data,
        beta,
        alpha,
        sw.w,
        wr,
        Method::Sr,
        Some(diagnostics),
    ))
}

/// Coefficient of determination of a fit.
///
/// `R² = 1 − Σ wrᵢ rᵢ² / Σ (yᵢ − ȳ)²`: the residual sum runs over the rows the
/// fit retained, the total sum over the whole sample. For least squares every
/// row is retained and this is the classical statistic. The adjusted variant
/// uses `1 − (1 − R²)(n − 1)/(n − p − 1)`. Zero response variance gives 0.
pub fn r_squared<T: Scalar>(data: &Dataset<T>, fit: &RegressionFit<T>) -> RSquared<T> {
    let y = data.response();
    let n = data.n();
    let nf = T::count(n);
    let mean = y.iter().copied().sum::<T>() / nf;
    let sst: T = y.iter().map(|&v| (v - mean) * (v - mean)).sum();
    if !(sst > T::zero()) {
        return RSquared {
            r2: T::zero(),
            adjusted: T::zero(),
        };
    }
    let sse: T = fit
        .residuals(data)
        .into_iter()
        .zip(&fit.wr)
        .filter(|(_, &keep)| keep)
        .map(|(r, _)| r * r)
        .sum();
    let r2 = T::one() - sse / sst;
    let dof = T::count(n - data.p() - 1);
    let adjusted = T::one() - (T::one() - r2) * (nf - T::one()) / dof;
    RSquared { r2, adjusted }
}

/// `yᵢ − βᵗxᵢ − α` for every row.
pub fn residuals<T: Scalar>(data: &Dataset<T>, beta: &[T], alpha: T) -> Vec<T> {
    data.carriers()
        .rows()
        .zip(data.response())
        .map(|(x, &y)| {
            let fitted = x.iter().zip(beta).map(|(&a, &b)| a * b).sum::<T>() + alpha;
            y - fitted
        })
        .collect()
}

fn check_retained(mask: &[bool], p: usize) -> Result<()> {
    let retained = mask.iter().filter(|&&k| k).count();
    if retained < p + 2 {
        return Err(Error::OverTrimming {
            retained,
            required: p + 2,
        });
    }
    Ok(())
}

/// Mean and covariance (divisor = number of selected rows) of the rows of `z`
/// selected by `mask`.
pub fn weighted_moments<T: Scalar>(z: &Matrix<T>, mask: &[bool]) -> Result<(Vec<T>, SymMatrix<T>)> {
    let d = z.ncols();
    let kept: Vec<&[T]> = z
        .rows()
        .zip(mask)
        .filter(|(_, &k)| k)
        .map(|(r, _)| r)
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptySample);
    }
    let m = T::count(kept.len());
    let mut mean = vec![T::zero(); d];
    for row in &kept {
        for (acc, &v) in mean.iter_mut().zip(*row) {
            *acc = *acc + v;
        }
    }
    mean.iter_mut().for_each(|v| *v = *v / m);
    let cov = SymMatrix::from_lower(d, |i, j| {
        kept.iter()
            .map(|r| (r[i] - mean[i]) * (r[j] - mean[j]))
            .sum::<T>()
            / m
    })?;
    Ok((mean, cov))
}

/// Slope and intercept from joint moments whose last coordinate is the
/// response.
fn regression_from_moments<T: Scalar>(
    mean: &[T],
    cov: &SymMatrix<T>,
    p: usize,
    stage: FitStage,
) -> Result<(Vec<T>, T)> {
    let idx: Vec<usize> = (0..p).collect();
    let sxx = cov.block(&idx)?;
    let sxy: Vec<T> = (0..p).map(|j| cov[(p, j)]).collect();
    let chol = Cholesky::factor_with_tolerance(&sxx, collinearity_tolerance::<T>())
        .map_err(|_| Error::CollinearCarriers { stage })?;
    let beta = chol.solve_vec(&sxy)?;
    let alpha = mean[p] - beta.iter().zip(mean).map(|(&b, &m)| b * m).sum::<T>();
    Ok((beta, alpha))
}

fn collinearity_tolerance<T: Scalar>() -> T {
    T::epsilon() * T::lit(1e3)
}

fn sw_regression<T: Scalar>(sw: &SwEstimates<T>, p: usize) -> Result<(Vec<T>, T, T)> {
    let (beta, alpha) =
        regression_from_moments(&sw.location, &sw.scatter, p, FitStage::AfterTrimming)?;
    let idx: Vec<usize> = (0..p).collect();
    let explained = sw.scatter.block(&idx)?.quad_form(&beta)?;
    let sigma2 = (sw.scatter[(p, p)] - explained).max(T::lit(SIGMA2_FLOOR));
    Ok((beta, alpha, sigma2))
}

/// Least squares on the selected rows (0/1 weighted normal equations).
fn ls_on_rows<T: Scalar>(data: &Dataset<T>, mask: &[bool], stage: FitStage) -> Result<(Vec<T>, T)> {
    let (mean, cov) = weighted_moments(&data.joint(), mask)?;
    regression_from_moments(&mean, &cov, data.p(), stage)
}

fn finish<T: Scalar>(
    data: &Dataset<T>,
    beta: Vec<T>,
    alpha: T,
    w: Vec<bool>,
    wr: Vec<bool>,
    method: Method,
    diagnostics: Option<SrDiagnostics<T>>,
) -> RegressionFit<T> {
    let res = residuals(data, &beta, alpha);
    let kept = wr.iter().filter(|&&k| k).count();
    let sigma2 = res
        .iter()
        .zip(&wr)
        .filter(|(_, &k)| k)
        .map(|(&r, _)| r * r)
        .sum::<T>()
        / T::count(kept.max(1));
    let outliers = wr
        .iter()
        .enumerate()
        .filter(|(_, &k)| !k)
        .map(|(i, _)| i)
        .collect();
    let mut fit = RegressionFit {
        beta,
        alpha,
        sigma2,
        w,
        wr,
        outliers,
        r2: T::zero(),
        adjusted_r2: T::zero(),
        method,
        diagnostics,
    };
    let r = r_squared(data, &fit);
    fit.r2 = r.r2;
    fit.adjusted_r2 = r.adjusted;
    fit
}
