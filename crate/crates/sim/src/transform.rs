//! Random affine transformations for the equivariance experiments.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use shrinkreg::{Data, Mat};

use crate::error::Result;

/// Draws below this magnitude are rejected to keep transforms well
/// conditioned.
pub const CONDITIONING_GUARD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    /// `y ↦ c·y + Xg + v`.
    RegressionY,
    /// `X ↦ XA` with `A = T·D`, `T` orthogonal and `D` positive diagonal.
    X,
}

impl std::str::FromStr for TransformKind {
    type Err = crate::error::SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "regression_y" | "regression-y" | "y" => Ok(TransformKind::RegressionY),
            "x" => Ok(TransformKind::X),
            other => Err(crate::error::SimError::InvalidConfig(format!(
                "unknown transform {other:?} (expected regression_y or x)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Transform {
    RegressionY {
        c: f64,
        g: Vec<f64>,
        v: f64,
    },
    /// `A = T · diag(d)`.
    X {
        t: Mat,
        d: Vec<f64>,
    },
}

impl Transform {
    pub fn identity(kind: TransformKind, p: usize) -> Self {
        match kind {
            TransformKind::RegressionY => Transform::RegressionY {
                c: 1.0,
                g: vec![0.0; p],
                v: 0.0,
            },
            TransformKind::X => Transform::X {
                t: Mat::identity(p),
                d: vec![1.0; p],
            },
        }
    }

    pub fn draw(kind: TransformKind, p: usize, rng: &mut ChaCha8Rng) -> Self {
        match kind {
            TransformKind::RegressionY => {
                let c = loop {
                    let c: f64 = rng.sample(StandardNormal);
                    if c.abs() >= CONDITIONING_GUARD {
                        break c;
                    }
                };
                let g = (0..p).map(|_| rng.sample(StandardNormal)).collect();
                let v = rng.sample(StandardNormal);
                Transform::RegressionY { c, g, v }
            }
            TransformKind::X => {
                let raw = Mat::from_fn(p, p, |_, _| rng.sample(StandardNormal));
                let t = orthonormalize(&raw);
                let d = (0..p)
                    .map(|_| loop {
                        let u: f64 = rng.random();
                        if u >= CONDITIONING_GUARD {
                            break u;
                        }
                    })
                    .collect();
                Transform::X { t, d }
            }
        }
    }

    pub fn apply(&self, data: &Data) -> Result<Data> {
        match self {
            Transform::RegressionY { c, g, v } => {
                let y = data
                    .carriers()
                    .rows()
                    .zip(data.response())
                    .map(|(x, &y)| c * y + x.iter().zip(g).map(|(a, b)| a * b).sum::<f64>() + v)
                    .collect();
                Ok(data.replace(data.carriers().clone(), y)?)
            }
            Transform::X { t, d } => {
                let xt = data.carriers().matmul(t)?;
                let p = d.len();
                let x = Mat::from_fn(data.n(), p, |i, j| xt[(i, j)] * d[j]);
                Ok(data.replace(x, data.response().to_vec())?)
            }
        }
    }

    /// Parameters an exactly equivariant estimator returns on the transformed
    /// data, given its parameters `(β, α)` on the original data.
    pub fn predict(&self, params: &[f64]) -> Vec<f64> {
        let p = params.len() - 1;
        match self {
            Transform::RegressionY { c, g, v } => {
                let mut out: Vec<f64> = (0..p).map(|j| c * params[j] + g[j]).collect();
                out.push(c * params[p] + v);
                out
            }
            Transform::X { t, d } => {
                // A⁻¹β = D⁻¹ Tᵗ β
                let mut out: Vec<f64> = (0..p)
                    .map(|j| (0..p).map(|i| t[(i, j)] * params[i]).sum::<f64>() / d[j])
                    .collect();
                out.push(params[p]);
                out
            }
        }
    }
}

/// Orthonormal columns by modified Gram–Schmidt. The implied triangular
/// factor has a positive diagonal, which fixes the column signs.
pub fn orthonormalize(a: &Mat) -> Mat {
    let (n, p) = (a.nrows(), a.ncols());
    let mut cols: Vec<Vec<f64>> = (0..p).map(|j| a.column(j)).collect();
    for j in 0..p {
        for i in 0..j {
            let proj: f64 = (0..n).map(|r| cols[i][r] * cols[j][r]).sum();
            for r in 0..n {
                cols[j][r] -= proj * cols[i][r];
            }
        }
        let norm = cols[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        cols[j].iter_mut().for_each(|v| *v /= norm);
    }
    Mat::from_fn(n, p, |i, j| cols[j][i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::replicate_rng;

    #[test]
    fn orthonormal_columns() {
        let mut rng = replicate_rng(1, 0);
        let t = match Transform::draw(TransformKind::X, 4, &mut rng) {
            Transform::X { t, .. } => t,
            _ => unreachable!(),
        };
        let tt = t.transpose().matmul(&t).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((tt[(i, j)] - e).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn guards_hold() {
        let mut rng = replicate_rng(2, 0);
        for _ in 0..200 {
            match Transform::draw(TransformKind::RegressionY, 3, &mut rng) {
                Transform::RegressionY { c, .. } => assert!(c.abs() >= CONDITIONING_GUARD),
                _ => unreachable!(),
            }
            match Transform::draw(TransformKind::X, 3, &mut rng) {
                Transform::X { d, .. } => assert!(d.iter().all(|&u| u >= CONDITIONING_GUARD)),
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn identity_predicts_same_parameters() {
        let params = [0.3, -1.0, 2.0];
        for kind in [TransformKind::RegressionY, TransformKind::X] {
            assert_eq!(
                Transform::identity(kind, 2).predict(&params),
                params.to_vec()
            );
        }
    }
}
