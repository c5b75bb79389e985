use serde::Serialize;

use crate::error::{Result, SimError};

/// Data-generating design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// Standard normal carriers and errors.
    Ne,
    /// Standard normal carriers, Student-t errors with 3 degrees of freedom.
    Te,
    /// Normal errors with a contaminated fraction of observations.
    Neo,
}

impl Scenario {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::Ne => "ne",
            Scenario::Te => "te",
            Scenario::Neo => "neo",
        }
    }
}

impl std::str::FromStr for Scenario {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ne" => Ok(Scenario::Ne),
            "te" => Ok(Scenario::Te),
            "neo" => Ok(Scenario::Neo),
            other => Err(SimError::InvalidConfig(format!(
                "unknown scenario {other:?} (expected ne, te or neo)"
            ))),
        }
    }
}

/// How contaminated rows are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContaminationMode {
    /// Each row independently with probability `delta`.
    #[default]
    Bernoulli,
    /// Exactly `round(delta * n)` rows drawn without replacement.
    FixedCount,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub p: usize,
    pub n: usize,
    /// Number of replications.
    pub m: usize,
    pub delta: f64,
    pub lambda_grid: Vec<f64>,
    pub k_grid: Vec<f64>,
    pub seed: u64,
    pub contamination: ContaminationMode,
}

/// `0, 1, ..., 10`.
pub fn integer_grid() -> Vec<f64> {
    (0..=10).map(f64::from).collect()
}

/// `0, 0.5, 1, 1.5, 2, 3, ..., 10`: the integer grid refined near the origin.
pub fn refined_grid() -> Vec<f64> {
    let mut g = vec![0.0, 0.5, 1.0, 1.5];
    g.extend((2..=10).map(f64::from));
    g
}

impl ScenarioConfig {
    /// Clean design (`Ne` or `Te`); the grids are unused.
    pub fn clean(scenario: Scenario, p: usize, n: usize, m: usize, seed: u64) -> Self {
        Self {
            scenario,
            p,
            n,
            m,
            delta: 0.0,
            lambda_grid: vec![0.0],
            k_grid: vec![0.0],
            seed,
            contamination: ContaminationMode::Bernoulli,
        }
    }

    pub fn contaminated(
        p: usize,
        n: usize,
        m: usize,
        delta: f64,
        lambda_grid: Vec<f64>,
        k_grid: Vec<f64>,
        seed: u64,
    ) -> Self {
        Self {
            scenario: Scenario::Neo,
            p,
            n,
            m,
            delta,
            lambda_grid,
            k_grid,
            seed,
            contamination: ContaminationMode::Bernoulli,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(SimError::InvalidConfig(msg));
        if self.p == 0 {
            return bad("p must be at least 1".into());
        }
        if self.n < self.p + 2 {
            return bad(format!("n = {} is below p + 2 = {}", self.n, self.p + 2));
        }
        if self.m == 0 {
            return bad("at least one replication is required".into());
        }
        if !(0.0..0.5).contains(&self.delta) {
            return bad(format!(
                "contamination fraction must lie in [0, 0.5), got {}",
                self.delta
            ));
        }
        if self.scenario == Scenario::Neo {
            if self.lambda_grid.is_empty() || self.k_grid.is_empty() {
                return bad("contaminated scenario needs non-empty lambda and k grids".into());
            }
            if self
                .lambda_grid
                .iter()
                .chain(&self.k_grid)
                .any(|v| !v.is_finite())
            {
                return bad("grid values must be finite".into());
            }
        }
        Ok(())
    }

    /// `(lambda, k)` cells in row-major order; a single `(0, 0)` cell for the
    /// clean designs.
    pub fn cells(&self) -> Vec<(f64, f64)> {
        match self.scenario {
            Scenario::Neo => self
                .lambda_grid
                .iter()
                .flat_map(|&l| self.k_grid.iter().map(move |&k| (l, k)))
                .collect(),
            _ => vec![(0.0, 0.0)],
        }
    }
}
