use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Regression sample: `n` observations of `p` carriers and one response.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    carriers: Matrix<T>,
    response: Vec<T>,
    names: Option<Vec<String>>,
}

impl<T: Scalar> Dataset<T> {
    /// Validates shape and finiteness; requires `p >= 1` and `n >= p + 2`.
    pub fn new(carriers: Matrix<T>, response: Vec<T>) -> Result<Self> {
        let n = carriers.nrows();
        let p = carriers.ncols();
        if p == 0 {
            return Err(Error::Validation(
                "at least one carrier is required (intercept-only fits are not supported)".into(),
            ));
        }
        if response.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} responses for {n} carrier rows",
                response.len()
            )));
        }
        if !carriers.is_finite() || response.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if n < p + 2 {
            return Err(Error::InsufficientSample { n, required: p + 2 });
        }
        Ok(Self {
            carriers,
            response,
            names: None,
        })
    }

    /// Attaches `p + 1` column labels, carriers first and response last.
    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.p() + 1 {
            return Err(Error::DimensionMismatch(format!(
                "{} names for {} columns",
                names.len(),
                self.p() + 1
            )));
        }
        self.names = Some(names);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.carriers.nrows()
    }

    pub fn p(&self) -> usize {
        self.carriers.ncols()
    }

    pub fn carriers(&self) -> &Matrix<T> {
        &self.carriers
    }

    pub fn response(&self) -> &[T] {
        &self.response
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// The joint sample `zᵢ = (xᵢ, yᵢ)` as an `n × (p + 1)` matrix.
    pub fn joint(&self) -> Matrix<T> {
        self.carriers
            .with_column(&self.response)
            .expect("response length checked on construction")
    }

    /// Sub-sample on the given rows (re-validated, so it may fail on size).
    pub fn select(&self, rows: &[usize]) -> Result<Self> {
        let carriers = self.carriers.select_rows(rows.iter().copied());
        let response = rows.iter().map(|&i| self.response[i]).collect();
        let mut out = Self::new(carriers, response)?;
        out.names = self.names.clone();
        Ok(out)
    }

    /// Same observations with transformed carriers and response.
    pub fn replace(&self, carriers: Matrix<T>, response: Vec<T>) -> Result<Self> {
        let mut out = Self::new(carriers, response)?;
        out.names = self.names.clone();
        Ok(out)
    }
}
