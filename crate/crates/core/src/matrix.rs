//! Small dense row-major matrices.
//!
//! The estimators only need row access, a few products and symmetric
//! factorizations, so this stays deliberately minimal.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Builds a matrix from row-major storage.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} columns, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.data.chunks_exact(self.cols.max(1)).take(self.rows)
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Matrix<T>) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok(self.rows().map(|r| dot(r, v)).collect())
    }

    /// Copies the selected rows into a new matrix.
    pub fn select_rows(&self, keep: impl Iterator<Item = usize>) -> Self {
        let mut data = Vec::new();
        let mut rows = 0;
        for i in keep {
            data.extend_from_slice(self.row(i));
            rows += 1;
        }
        Self {
            rows,
            cols: self.cols,
            data,
        }
    }

    /// Appends `col` as a new last column.
    pub fn with_column(&self, col: &[T]) -> Result<Self> {
        if col.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "column of length {} for {} rows",
                col.len(),
                self.rows
            )));
        }
        Ok(Self::from_fn(self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self[(i, j)]
            } else {
                col[i]
            }
        }))
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Symmetric matrix; the lower triangle is authoritative and mirrored on
/// construction, so `m[(i, j)] == m[(j, i)]` holds bit-for-bit.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<T> {
    inner: Matrix<T>,
}

impl<T: Scalar> SymMatrix<T> {
    /// Builds from a function evaluated on the lower triangle only (`j <= i`).
    pub fn from_lower(dim: usize, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Validation("symmetric matrix needs dim >= 1".into()));
        }
        let mut m = Matrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..=i {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(Self { inner: m })
    }

    /// Symmetrizes a square matrix by copying its lower triangle.
    pub fn from_matrix_lower(m: &Matrix<T>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} is not square",
                m.nrows(),
                m.ncols()
            )));
        }
        Self::from_lower(m.nrows(), |i, j| m[(i, j)])
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::from_lower(dim, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn diagonal(values: &[T]) -> Result<Self> {
        Self::from_lower(
            values.len(),
            |i, j| if i == j { values[i] } else { T::zero() },
        )
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn as_matrix(&self) -> &Matrix<T> {
        &self.inner
    }

    pub fn trace(&self) -> T {
        (0..self.dim()).map(|i| self.inner[(i, i)]).sum()
    }

    /// `(1 - w) * self + w * scale * I`.
    pub fn shrink_toward_identity(&self, w: T, scale: T) -> Self {
        let d = self.dim();
        let mut m = self.inner.map(|x| (T::one() - w) * x);
        for i in 0..d {
            m[(i, i)] = m[(i, i)] + w * scale;
        }
        Self { inner: m }
    }

    /// Squared Frobenius norm of `self - scale * I`.
    pub fn frobenius_dist2_to_scaled_identity(&self, scale: T) -> T {
        let d = self.dim();
        let mut acc = T::zero();
        for i in 0..d {
            for j in 0..d {
                let target = if i == j { scale } else { T::zero() };
                let diff = self.inner[(i, j)] - target;
                acc = acc + diff * diff;
            }
        }
        acc
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        self.inner.mul_vec(v)
    }

    /// Quadratic form `vᵗ A v`.
    pub fn quad_form(&self, v: &[T]) -> Result<T> {
        let av = self.mul_vec(v)?;
        Ok(dot(&av, v))
    }

    /// Principal sub-block on the given index set.
    pub fn block(&self, idx: &[usize]) -> Result<Self> {
        Self::from_lower(idx.len(), |i, j| self.inner[(idx[i], idx[j])])
    }
}

impl<T> Index<(usize, usize)> for SymMatrix<T> {
    type Output = T;
    fn index(&self, ix: (usize, usize)) -> &T {
        &self.inner[ix]
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm2<T: Scalar>(v: &[T]) -> T {
    dot(v, v).sqrt()
}
