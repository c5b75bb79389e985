//! Seeded Monte-Carlo experiments for the shrinkage reweighted estimator:
//! efficiency under normal errors, error under heavy tails and contamination,
//! breakdown sweeps, empirical equivariance and timing.
//!
//! Every replicate draws from its own ChaCha8 stream keyed by
//! `(seed, replicate)`, so results do not depend on the number of worker
//! threads and all methods see the same datasets.

pub mod error;
pub mod experiments;
pub mod generate;
pub mod metrics;
pub mod output;
pub mod scenario;
pub mod transform;

pub use error::{Result, SimError};
pub use experiments::{
    breakdown_run, efficiency, equivariance_run, fit_params, mse_table, timing_run,
    EfficiencyResult, EquivarianceTable, MetricsTable, RunOptions, TimingResult,
};
pub use generate::{generate, replicate_rng, ReplicateDraw};
pub use metrics::{MethodRollup, MetricsCell};
pub use scenario::{integer_grid, refined_grid, ContaminationMode, Scenario, ScenarioConfig};
pub use transform::{Transform, TransformKind};
