use thiserror::Error;

/// Failure modes shared by the numerical kernels and the estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty sample")]
    EmptySample,

    #[error("non-finite value in input")]
    NonFinite,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("insufficient sample: n = {n}, need at least {required}")]
    InsufficientSample { n: usize, required: usize },

    #[error("degenerate scatter")]
    DegenerateScatter,

    #[error("over-trimming: {retained} observations retained, need at least {required}")]
    OverTrimming { retained: usize, required: usize },

    #[error("collinear carriers{}", stage.suffix())]
    CollinearCarriers { stage: FitStage },

    #[error("invalid input: {0}")]
    Validation(String),
}

impl Error {
    /// True for failures caused by the input itself rather than by numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::EmptySample
                | Error::NonFinite
                | Error::Domain(_)
                | Error::DimensionMismatch(_)
                | Error::InsufficientSample { .. }
                | Error::Validation(_)
        )
    }
}

/// Pipeline stage at which a singular carrier block was detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitStage {
    Moments,
    AfterTrimming,
    AfterReweighting,
}

impl FitStage {
    fn suffix(&self) -> &'static str {
        match self {
            FitStage::Moments => "",
            FitStage::AfterTrimming => " after trimming",
            FitStage::AfterReweighting => " after reweighting",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
