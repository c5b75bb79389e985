//! Numerical kernels: order statistics, the chi-square quantile function and
//! symmetric positive-definite solves.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::matrix::{Matrix, SymMatrix};
use crate::scalar::Scalar;

/// Sample median. Even-length samples return the midpoint of the two middle
/// order statistics.
pub fn median<T: Scalar>(values: &[T]) -> Result<T> {
    let mut buf = values.to_vec();
    median_in_place(&mut buf)
}

/// Like [`median`] but reorders `buf` instead of allocating.
pub fn median_in_place<T: Scalar>(buf: &mut [T]) -> Result<T> {
    let n = buf.len();
    if n == 0 {
        return Err(Error::EmptySample);
    }
    if buf.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let cmp = |a: &T, b: &T| a.partial_cmp(b).unwrap_or(Ordering::Equal);
    let mid = n / 2;
    let (lower, upper_mid, _) = buf.select_nth_unstable_by(mid, cmp);
    let upper = *upper_mid;
    if n % 2 == 1 {
        return Ok(upper);
    }
    let lower_max = lower
        .iter()
        .copied()
        .fold(T::neg_infinity(), |acc, x| if x > acc { x } else { acc });
    Ok((lower_max + upper) / T::lit(2.0))
}

/// Normalized median absolute deviation (consistent for the normal sd).
pub fn mad<T: Scalar>(values: &[T]) -> Result<T> {
    let med = median(values)?;
    let mut dev: Vec<T> = values.iter().map(|&x| (x - med).abs()).collect();
    Ok(T::lit(1.482_602_218_505_602) * median_in_place(&mut dev)?)
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let t = x + LANCZOS_G + 0.5;
    let mut a = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn regularized_gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    if x < a + 1.0 {
        gamma_p_series(a, x)
    } else {
        1.0 - gamma_q_continued_fraction(a, x)
    }
}

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..10_000 {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * 1e-17 {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
fn gamma_q_continued_fraction(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-17 {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Chi-square CDF with `dof` degrees of freedom.
pub fn chisq_cdf(dof: u32, x: f64) -> f64 {
    regularized_gamma_p(f64::from(dof) / 2.0, x / 2.0)
}

/// Chi-square density.
pub fn chisq_pdf(dof: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let a = f64::from(dof) / 2.0;
    ((a - 1.0) * x.ln() - x / 2.0 - a * std::f64::consts::LN_2 - ln_gamma(a)).exp()
}

/// Chi-square quantile: the `x` with `CDF(x) = prob`.
///
/// Bracketing bisection followed by a guarded Newton polish.
pub fn chisq_quantile(dof: u32, prob: f64) -> Result<f64> {
    if dof == 0 {
        return Err(Error::Domain("chi-square needs dof >= 1".into()));
    }
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::Domain(format!("probability {prob} outside (0, 1)")));
    }
    let mut lo = 0.0_f64;
    let mut hi = f64::from(dof).max(1.0) * 2.0;
    while chisq_cdf(dof, hi) < prob {
        lo = hi;
        hi *= 2.0;
    }
    // Relative width: tiny probabilities at low dof have quantiles near 1e-12.
    for _ in 0..2000 {
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if chisq_cdf(dof, mid) < prob {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..4 {
        let pdf = chisq_pdf(dof, x);
        if pdf <= 0.0 || !pdf.is_finite() {
            break;
        }
        let step = (chisq_cdf(dof, x) - prob) / pdf;
        let next = x - step;
        if !(next >= lo && next <= hi) {
            break;
        }
        x = next;
        if step.abs() < 1e-15 * (1.0 + x) {
            break;
        }
    }
    Ok(x)
}

/// Lower-triangular factor `L` with `A = L Lᵗ`.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    lower: Matrix<T>,
}

impl<T: Scalar> Cholesky<T> {
    /// Fails on the first non-positive pivot.
    pub fn factor(a: &SymMatrix<T>) -> Result<Self> {
        Self::factor_with_tolerance(a, T::zero())
    }

    /// Fails when a squared pivot is `<= rel_tol * max(diag(A))`; used to flag
    /// numerically singular carrier blocks.
    pub fn factor_with_tolerance(a: &SymMatrix<T>, rel_tol: T) -> Result<Self> {
        let d = a.dim();
        let max_diag = (0..d)
            .map(|i| a[(i, i)].abs())
            .fold(T::zero(), |m, x| if x > m { x } else { m });
        let floor = rel_tol * max_diag;
        let mut l = Matrix::zeros(d, d);
        for j in 0..d {
            let mut s = a[(j, j)];
            for k in 0..j {
                s = s - l[(j, k)] * l[(j, k)];
            }
            if !(s > floor) {
                return Err(Error::NotPositiveDefinite { pivot: j });
            }
            let pivot = s.sqrt();
            l[(j, j)] = pivot;
            for i in (j + 1)..d {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s = s - l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / pivot;
            }
        }
        Ok(Self { lower: l })
    }

    pub fn dim(&self) -> usize {
        self.lower.nrows()
    }

    pub fn lower(&self) -> &Matrix<T> {
        &self.lower
    }

    pub fn solve_vec(&self, b: &[T]) -> Result<Vec<T>> {
        let d = self.dim();
        if b.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "rhs of length {} for a {d}x{d} system",
                b.len()
            )));
        }
        let l = &self.lower;
        let mut y = b.to_vec();
        for i in 0..d {
            let mut s = y[i];
            for k in 0..i {
                s = s - l[(i, k)] * y[k];
            }
            y[i] = s / l[(i, i)];
        }
        for i in (0..d).rev() {
            let mut s = y[i];
            for k in (i + 1)..d {
                s = s - l[(k, i)] * y[k];
            }
            y[i] = s / l[(i, i)];
        }
        Ok(y)
    }

    pub fn solve_matrix(&self, b: &Matrix<T>) -> Result<Matrix<T>> {
        if b.nrows() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "rhs with {} rows for a {}-dim system",
                b.nrows(),
                self.dim()
            )));
        }
        let mut out = Matrix::zeros(b.nrows(), b.ncols());
        for j in 0..b.ncols() {
            let x = self.solve_vec(&b.column(j))?;
            for (i, v) in x.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        Ok(out)
    }

    /// `vᵗ A⁻¹ v` via one forward substitution.
    pub fn inv_quad_form(&self, v: &[T]) -> Result<T> {
        let d = self.dim();
        if v.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for a {d}-dim form",
                v.len()
            )));
        }
        let l = &self.lower;
        let mut y = v.to_vec();
        let mut acc = T::zero();
        for i in 0..d {
            let mut s = y[i];
            for k in 0..i {
                s = s - l[(i, k)] * y[k];
            }
            y[i] = s / l[(i, i)];
            acc = acc + y[i] * y[i];
        }
        Ok(acc)
    }
}

/// Solves `A x = b` for symmetric positive-definite `A`.
pub fn spd_solve<T: Scalar>(a: &SymMatrix<T>, b: &[T]) -> Result<Vec<T>> {
    Cholesky::factor(a)?.solve_vec(b)
}

/// Solves `A X = B` column by column.
pub fn spd_solve_matrix<T: Scalar>(a: &SymMatrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    Cholesky::factor(a)?.solve_matrix(b)
}
