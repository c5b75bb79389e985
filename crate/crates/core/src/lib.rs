//! Shrinkage reweighted robust linear regression.
//!
//! The estimator rejects rows that are far from a shrinkage estimate of the
//! joint location and scatter of `(x, y)`, rejects rows with large residuals
//! from the resulting interim fit, and finishes with least squares on what
//! remains. Everything is generic over `f32`/`f64`; the aliases at the crate
//! root fix `f64`.

pub mod dataset;
pub mod error;
pub mod matrix;
pub mod numerics;
pub mod regression;
pub mod scalar;
pub mod shrinkage;

pub use dataset::Dataset;
pub use error::{Error, FitStage, Result};
pub use matrix::{Matrix, SymMatrix};
pub use numerics::{chisq_cdf, chisq_quantile, median, Cholesky};
pub use regression::{
    ols_fit, r_squared, sr_fit, sr_fit_with, sw_fit, sw_fit_with, Method, RSquared, RegressionFit,
    SrConfig, SrDiagnostics,
};
pub use scalar::Scalar;
pub use shrinkage::{
    comedian_matrix, l1_median, l1_objective, shrinkage_mean, shrinkage_scatter, IntensityRule,
    L1Median, ShrinkageLocation, ShrinkageScatter,
};

pub type Data = Dataset<f64>;
pub type Fit = RegressionFit<f64>;
pub type Mat = Matrix<f64>;
pub type SymMat = SymMatrix<f64>;
