use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use shrinkreg::{chisq_quantile, Data, Mat};

use crate::error::Result;
use crate::scenario::{ContaminationMode, Scenario, ScenarioConfig};

/// Variance of the contaminating normal laws.
pub const CONTAMINATION_VARIANCE: f64 = 1.5;

/// Independent generator for one replicate: stream `replicate` of the
/// ChaCha8 generator seeded by `seed`.
pub fn replicate_rng(seed: u64, replicate: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate as u64);
    rng
}

/// Everything random about one replicate, drawn once and shared by every
/// `(lambda, k)` cell so that cells differ only through the contamination
/// centers.
#[derive(Debug, Clone)]
pub struct ReplicateDraw {
    x: Mat,
    y: Vec<f64>,
    /// Contaminated rows, ascending.
    contaminated: Vec<usize>,
    /// Standard normal noise for the contaminated rows, `p + 1` values each.
    noise: Vec<Vec<f64>>,
    carrier_scale: f64,
    response_scale: f64,
}

impl ReplicateDraw {
    /// Draws carriers, then clean responses, then (for the contaminated
    /// design) the contaminated rows and their noise, in that order.
    pub fn new(config: &ScenarioConfig, rng: &mut ChaCha8Rng) -> Result<Self> {
        let (n, p) = (config.n, config.p);
        let x = Mat::from_fn(n, p, |_, _| rng.sample(StandardNormal));
        let y: Vec<f64> = match config.scenario {
            Scenario::Ne | Scenario::Neo => (0..n).map(|_| rng.sample(StandardNormal)).collect(),
            Scenario::Te => (0..n).map(|_| student_t3(rng)).collect(),
        };
        let mut contaminated = Vec::new();
        let mut noise = Vec::new();
        if config.scenario == Scenario::Neo && config.delta > 0.0 {
            contaminated = match config.contamination {
                ContaminationMode::Bernoulli => (0..n)
                    .filter(|_| rng.random::<f64>() < config.delta)
                    .collect(),
                ContaminationMode::FixedCount => {
                    let count = ((config.delta * n as f64).round() as usize).min(n);
                    let mut rows = rand::seq::index::sample(rng, n, count).into_vec();
                    rows.sort_unstable();
                    rows
                }
            };
            noise = contaminated
                .iter()
                .map(|_| (0..=p).map(|_| rng.sample(StandardNormal)).collect())
                .collect();
        }
        Ok(Self {
            x,
            y,
            contaminated,
            noise,
            carrier_scale: chisq_quantile(p as u32, 0.99)?.sqrt(),
            response_scale: chisq_quantile(1, 0.99)?.sqrt(),
        })
    }

    pub fn contaminated(&self) -> &[usize] {
        &self.contaminated
    }

    /// The replicate's dataset at contamination centers `lambda` (carriers)
    /// and `k` (response).
    pub fn dataset(&self, lambda: f64, k: f64) -> Result<Data> {
        let mut x = self.x.clone();
        let mut y = self.y.clone();
        let sd = CONTAMINATION_VARIANCE.sqrt();
        let p = x.ncols();
        for (&i, e) in self.contaminated.iter().zip(&self.noise) {
            for j in 0..p {
                x[(i, j)] = lambda * self.carrier_scale + sd * e[j];
            }
            y[i] = k * self.response_scale + sd * e[p];
        }
        Ok(Data::new(x, y)?)
    }
}

/// `Z / sqrt(χ²₃ / 3)` with the chi-square built from three normals.
fn student_t3(rng: &mut ChaCha8Rng) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    let chi2: f64 = (0..3)
        .map(|_| {
            let u: f64 = rng.sample(StandardNormal);
            u * u
        })
        .sum();
    z / (chi2 / 3.0).sqrt()
}

/// Dataset of replicate `replicate` at cell `(lambda, k)`; a pure function of
/// the configuration and its arguments.
pub fn generate(config: &ScenarioConfig, replicate: usize, lambda: f64, k: f64) -> Result<Data> {
    let mut rng = replicate_rng(config.seed, replicate);
    ReplicateDraw::new(config, &mut rng)?.dataset(lambda, k)
}
