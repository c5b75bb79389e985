#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use shrinkreg::{Dataset, Matrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal_matrix(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Matrix<f64> {
    Matrix::from_fn(n, d, |_, _| rng.sample(StandardNormal))
}

/// `y = xᵗβ + α + ε` with standard normal carriers and noise of scale `sd`.
pub fn linear_dataset(
    rng: &mut ChaCha8Rng,
    n: usize,
    beta: &[f64],
    alpha: f64,
    sd: f64,
) -> Dataset<f64> {
    let x = normal_matrix(rng, n, beta.len());
    let y = x
        .rows()
        .map(|r| {
            let e: f64 = rng.sample(StandardNormal);
            r.iter().zip(beta).map(|(a, b)| a * b).sum::<f64>() + alpha + sd * e
        })
        .collect();
    Dataset::new(x, y).unwrap()
}

/// Solves a dense square system by Gaussian elimination with partial pivoting.
pub fn gauss_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &v)| {
            let mut r = row.clone();
            r.push(v);
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        m.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..=n {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| m[r][c] * x[c]).sum();
        x[r] = (m[r][n] - s) / m[r][r];
    }
    x
}

/// Least squares through the raw normal equations on `u = (x, 1)`.
pub fn normal_equations_fit(data: &Dataset<f64>, rows: &[usize]) -> Vec<f64> {
    let p = data.p();
    let mut gram = vec![vec![0.0; p + 1]; p + 1];
    let mut rhs = vec![0.0; p + 1];
    for &i in rows {
        let mut u = data.carriers().row(i).to_vec();
        u.push(1.0);
        for a in 0..=p {
            rhs[a] += u[a] * data.response()[i];
            for b in 0..=p {
                gram[a][b] += u[a] * u[b];
            }
        }
    }
    gauss_solve(&gram, &rhs)
}
