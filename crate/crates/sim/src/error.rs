use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("could not build worker pool: {0}")]
    Pool(String),

    #[error(transparent)]
    Estimator(#[from] shrinkreg::Error),

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

impl SimError {
    pub fn is_validation(&self) -> bool {
        match self {
            SimError::InvalidConfig(_) => true,
            SimError::Estimator(e) => e.is_validation(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, SimError>;
