//! Robust location and scatter by shrinkage.
//!
//! The location is the spatial (L1) median pulled toward a constant vector;
//! the scatter is the adjusted comedian matrix pulled toward a scaled
//! identity. Both shrinkage intensities are data-driven plug-ins that trade
//! the estimator's variance against its distance from the target.

use crate::error::{Error, Result};
use crate::matrix::{Matrix, SymMatrix};
use crate::numerics::{mad, median, median_in_place, Cholesky};
use crate::scalar::Scalar;

/// Makes the median of squared deviations consistent for the variance under
/// normality (`1 / Φ⁻¹(3/4)²`).
pub const COMEDIAN_CONSISTENCY: f64 = 2.198;

/// Smallest scatter intensity ever used, so the raw comedian (which need not
/// be positive semi-definite) is never returned as is.
pub const SCATTER_ETA_FLOOR: f64 = 1e-6;

const WEISZFELD_TOL: f64 = 1e-8;
const WEISZFELD_MAX_ITER: usize = 1000;
const COINCIDENCE_TOL: f64 = 1e-12;

/// Result of the Weiszfeld iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct L1Median<T> {
    pub point: Vec<T>,
    pub iterations: usize,
    pub converged: bool,
}

/// Spatial median `argmin_μ Σᵢ ‖xᵢ − μ‖₂`.
///
/// Weiszfeld iteration from the coordinatewise median, with the Vardi–Zhang
/// step when the iterate lands on a data point. Stops when successive
/// iterates differ by less than `1e-8` in sup-norm; after 1000 iterations the
/// last iterate is returned with `converged == false`.
pub fn l1_median<T: Scalar>(data: &Matrix<T>) -> Result<L1Median<T>> {
    let n = data.nrows();
    let d = data.ncols();
    if n == 0 || d == 0 {
        return Err(Error::EmptySample);
    }
    if !data.is_finite() {
        return Err(Error::NonFinite);
    }
    if n == 1 {
        return Ok(L1Median {
            point: data.row(0).to_vec(),
            iterations: 0,
            converged: true,
        });
    }

    let mut y = coordinatewise_median(data)?;
    let tol = T::lit(WEISZFELD_TOL);
    for iter in 1..=WEISZFELD_MAX_ITER {
        let next = match weiszfeld_step(data, &y) {
            WeiszfeldStep::Optimal => {
                return Ok(L1Median {
                    point: y,
                    iterations: iter,
                    converged: true,
                })
            }
            WeiszfeldStep::Moved(next) => next,
        };
        let step = next
            .iter()
            .zip(&y)
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), |m, x| if x > m { x } else { m });
        y = next;
        if step < tol {
            return Ok(L1Median {
                point: snap_to_vertex(data, y),
                iterations: iter,
                converged: true,
            });
        }
    }
    Ok(L1Median {
        point: snap_to_vertex(data, y),
        iterations: WEISZFELD_MAX_ITER,
        converged: false,
    })
}

/// Weiszfeld approaches a minimizer that sits on a data point only
/// sublinearly. If the data point nearest the final iterate satisfies the
/// optimality condition, it is returned instead.
fn snap_to_vertex<T: Scalar>(data: &Matrix<T>, y: Vec<T>) -> Vec<T> {
    let dist2 = |row: &[T]| -> T { row.iter().zip(&y).map(|(&a, &b)| (a - b) * (a - b)).sum() };
    let nearest = data
        .rows()
        .min_by(|a, b| {
            dist2(a)
                .partial_cmp(&dist2(b))
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .expect("non-empty sample");
    match weiszfeld_step(data, nearest) {
        WeiszfeldStep::Optimal => nearest.to_vec(),
        WeiszfeldStep::Moved(_) => y,
    }
}

/// Outcome of one Weiszfeld update.
#[derive(Debug, Clone, PartialEq)]
pub enum WeiszfeldStep<T> {
    Moved(Vec<T>),
    /// The current iterate is a data point satisfying the optimality
    /// condition (or every point coincides with it).
    Optimal,
}

/// One Weiszfeld update from `y`, with the Vardi–Zhang modification when `y`
/// coincides with data points. Never increases [`l1_objective`].
pub fn weiszfeld_step<T: Scalar>(data: &Matrix<T>, y: &[T]) -> WeiszfeldStep<T> {
    let d = data.ncols();
    let tie = T::lit(COINCIDENCE_TOL);
    let mut num = vec![T::zero(); d];
    let mut pull = vec![T::zero(); d];
    let mut den = T::zero();
    let mut coincident = 0usize;
    for row in data.rows() {
        let dist = row
            .iter()
            .zip(y)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<T>()
            .sqrt();
        if dist < tie {
            coincident += 1;
            continue;
        }
        let w = T::one() / dist;
        den = den + w;
        for k in 0..d {
            num[k] = num[k] + row[k] * w;
            pull[k] = pull[k] + (row[k] - y[k]) * w;
        }
    }
    if den == T::zero() {
        return WeiszfeldStep::Optimal;
    }
    let target = num.into_iter().map(|v| v / den);
    if coincident == 0 {
        return WeiszfeldStep::Moved(target.collect());
    }
    let r = pull.iter().map(|&v| v * v).sum::<T>().sqrt();
    let m = T::count(coincident);
    if r <= m {
        return WeiszfeldStep::Optimal;
    }
    let gamma = m / r;
    WeiszfeldStep::Moved(
        target
            .zip(y)
            .map(|(t, &cur)| (T::one() - gamma) * t + gamma * cur)
            .collect(),
    )
}

/// `Σᵢ ‖xᵢ − μ‖₂`, the objective the spatial median minimizes.
pub fn l1_objective<T: Scalar>(data: &Matrix<T>, mu: &[T]) -> T {
    data.rows()
        .map(|row| {
            row.iter()
                .zip(mu)
                .map(|(&a, &b)| (a - b) * (a - b))
                .sum::<T>()
                .sqrt()
        })
        .sum()
}

pub fn coordinatewise_median<T: Scalar>(data: &Matrix<T>) -> Result<Vec<T>> {
    (0..data.ncols())
        .map(|j| median_in_place(&mut data.column(j)))
        .collect()
}

/// Shrinkage location `(1 − η) μ_MM + η ν e`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkageLocation<T> {
    pub center: Vec<T>,
    pub eta: T,
    pub nu: T,
    pub l1_median: Vec<T>,
    pub converged: bool,
}

/// Shrinkage location of the rows of `data`.
///
/// The target scale is the grand mean of the spatial median's coordinates.
/// The intensity is `ê / (ê + ‖μ_MM − ν e‖²)` with the estimator variance
/// `ê = (π/2) Σⱼ MADⱼ² / n`.
pub fn shrinkage_mean<T: Scalar>(data: &Matrix<T>) -> Result<ShrinkageLocation<T>> {
    let n = data.nrows();
    if n < 2 {
        return Err(Error::InsufficientSample { n, required: 2 });
    }
    let med = l1_median(data)?;
    let d = data.ncols();
    let nu = med.point.iter().copied().sum::<T>() / T::count(d);
    let spread: T = med.point.iter().map(|&m| (m - nu) * (m - nu)).sum();
    let mut var = T::zero();
    for j in 0..d {
        let s = mad(&data.column(j))?;
        var = var + s * s;
    }
    let var = T::lit(std::f64::consts::FRAC_PI_2) * var / T::count(n);
    let eta = if var + spread > T::zero() {
        (var / (var + spread)).min(T::one())
    } else {
        T::zero()
    };
    let center = med
        .point
        .iter()
        .map(|&m| (T::one() - eta) * m + eta * nu)
        .collect();
    Ok(ShrinkageLocation {
        center,
        eta,
        nu,
        l1_median: med.point,
        converged: med.converged,
    })
}

/// Adjusted comedian: entry `(j, t)` is `2.198 · medianᵢ (xᵢⱼ − cⱼ)(xᵢₜ − cₜ)`.
pub fn comedian_matrix<T: Scalar>(data: &Matrix<T>, center: &[T]) -> Result<SymMatrix<T>> {
    let n = data.nrows();
    let d = data.ncols();
    if n < 2 {
        return Err(Error::InsufficientSample { n, required: 2 });
    }
    if center.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "center of length {} for {d} columns",
            center.len()
        )));
    }
    let centered = center_rows(data, center);
    let k = T::lit(COMEDIAN_CONSISTENCY);
    let mut buf = vec![T::zero(); n];
    let mut entries = vec![T::zero(); d * d];
    for j in 0..d {
        for t in 0..=j {
            for (i, slot) in buf.iter_mut().enumerate() {
                *slot = centered[(i, j)] * centered[(i, t)];
            }
            entries[j * d + t] = k * median_in_place(&mut buf)?;
        }
    }
    SymMatrix::from_lower(d, |j, t| entries[j * d + t])
}

/// How the scatter shrinkage intensity is estimated.
///
/// Both rules share the Ledoit–Wolf form `η = min(1, b̂ / d̂)` with
/// `d̂ = ‖Ŝ − νI‖²_F` and per-observation dispersion
/// `δᵢ = ‖2.198·cᵢcᵢᵗ − Ŝ‖²_F`; they differ in how the `δᵢ` are pooled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IntensityRule {
    /// `b̂ = medianᵢ(δᵢ) / n`: outlying rows cannot inflate the intensity.
    #[default]
    MedianDispersion,
    /// `b̂ = Σᵢ δᵢ / n²`, the classical moment form.
    MeanDispersion,
}

/// Shrinkage scatter `(1 − η) Ŝ + η ν I`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkageScatter<T> {
    pub matrix: SymMatrix<T>,
    pub eta: T,
    pub nu: T,
    pub comedian: SymMatrix<T>,
}

/// Shrinkage scatter with the default intensity rule.
pub fn shrinkage_scatter<T: Scalar>(
    data: &Matrix<T>,
    location: &ShrinkageLocation<T>,
) -> Result<ShrinkageScatter<T>> {
    shrinkage_scatter_with_rule(data, location, IntensityRule::default())
}

pub fn shrinkage_scatter_with_rule<T: Scalar>(
    data: &Matrix<T>,
    location: &ShrinkageLocation<T>,
    rule: IntensityRule,
) -> Result<ShrinkageScatter<T>> {
    let comedian = comedian_matrix(data, &location.center)?;
    let nu = target_scale(&comedian)?;
    let eta = scatter_intensity(data, &location.center, &comedian, nu, rule)?;
    finish_scatter(comedian, nu, eta)
}

/// Shrinkage scatter at a caller-chosen intensity (clamped to `[floor, 1]`).
pub fn shrinkage_scatter_with_eta<T: Scalar>(
    data: &Matrix<T>,
    location: &ShrinkageLocation<T>,
    eta: T,
) -> Result<ShrinkageScatter<T>> {
    let comedian = comedian_matrix(data, &location.center)?;
    let nu = target_scale(&comedian)?;
    finish_scatter(comedian, nu, clamp_eta(eta))
}

fn target_scale<T: Scalar>(comedian: &SymMatrix<T>) -> Result<T> {
    let nu = comedian.trace() / T::count(comedian.dim());
    if !(nu > T::zero()) {
        return Err(Error::DegenerateScatter);
    }
    Ok(nu)
}

fn clamp_eta<T: Scalar>(eta: T) -> T {
    eta.max(T::lit(SCATTER_ETA_FLOOR)).min(T::one())
}

/// Plug-in scatter intensity, clamped to `[1e-6, 1]`.
pub fn scatter_intensity<T: Scalar>(
    data: &Matrix<T>,
    center: &[T],
    comedian: &SymMatrix<T>,
    nu: T,
    rule: IntensityRule,
) -> Result<T> {
    let n = data.nrows();
    let d = data.ncols();
    let dist = comedian.frobenius_dist2_to_scaled_identity(nu);
    if dist == T::zero() {
        return Ok(T::one());
    }
    let k = T::lit(COMEDIAN_CONSISTENCY);
    let centered = center_rows(data, center);
    let dispersion: Vec<T> = centered
        .rows()
        .map(|c| {
            let mut acc = T::zero();
            for j in 0..d {
                for t in 0..d {
                    let diff = k * c[j] * c[t] - comedian[(j, t)];
                    acc = acc + diff * diff;
                }
            }
            acc
        })
        .collect();
    let nf = T::count(n);
    let b = match rule {
        IntensityRule::MedianDispersion => median(&dispersion)? / nf,
        IntensityRule::MeanDispersion => dispersion.iter().copied().sum::<T>() / (nf * nf),
    };
    Ok(clamp_eta(b.min(dist) / dist))
}

fn finish_scatter<T: Scalar>(comedian: SymMatrix<T>, nu: T, eta: T) -> Result<ShrinkageScatter<T>> {
    let mut eta = eta;
    loop {
        let matrix = comedian.shrink_toward_identity(eta, nu);
        if Cholesky::factor(&matrix).is_ok() {
            return Ok(ShrinkageScatter {
                matrix,
                eta,
                nu,
                comedian,
            });
        }
        if eta >= T::one() {
            // ν I with ν > 0 always factors; only reachable on non-finite input
            return Err(Error::DegenerateScatter);
        }
        eta = (eta + T::lit(0.1)).min(T::one());
    }
}

fn center_rows<T: Scalar>(data: &Matrix<T>, center: &[T]) -> Matrix<T> {
    Matrix::from_fn(data.nrows(), data.ncols(), |i, j| data[(i, j)] - center[j])
}
