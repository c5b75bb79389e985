use std::fmt::Write as _;

use serde::Serialize;
use shrinkreg::{Data, Fit, SrConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coefficient {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Weights {
    pub w: Vec<u8>,
    pub wr: Vec<u8>,
}

/// Everything needed to replay a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub dataset: String,
    pub dataset_sha256: String,
    pub delta1: f64,
    pub delta2: f64,
    pub seed: u64,
    pub version: &'static str,
}

impl Provenance {
    pub fn new(dataset: &str, sha256: &str, sr: &SrConfig, seed: u64) -> Self {
        Self {
            dataset: dataset.to_string(),
            dataset_sha256: sha256.to_string(),
            delta1: sr.delta1,
            delta2: sr.delta2,
            seed,
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub method: String,
    pub n: usize,
    pub p: usize,
    /// Intercept first, then one slope per carrier.
    pub coefficients: Vec<Coefficient>,
    pub sigma2: f64,
    pub r2: f64,
    pub adjusted_r2: f64,
    /// 1-based, ascending.
    pub outlier_indices: Vec<usize>,
    pub weights: Weights,
    pub provenance: Provenance,
}

impl FitReport {
    pub fn new(data: &Data, fit: &Fit, provenance: Provenance) -> Self {
        let names: Vec<String> = match data.names() {
            Some(n) => n[..data.p()].to_vec(),
            None => (1..=data.p()).map(|j| format!("x{j}")).collect(),
        };
        let mut coefficients = vec![Coefficient {
            name: "intercept".into(),
            value: fit.alpha,
        }];
        coefficients.extend(
            names
                .into_iter()
                .zip(&fit.beta)
                .map(|(name, &value)| Coefficient { name, value }),
        );
        let bits = |v: &[bool]| v.iter().map(|&b| u8::from(b)).collect();
        Self {
            method: fit.method.to_string(),
            n: data.n(),
            p: data.p(),
            coefficients,
            sigma2: fit.sigma2,
            r2: fit.r2,
            adjusted_r2: fit.adjusted_r2,
            outlier_indices: fit.outliers.iter().map(|i| i + 1).collect(),
            weights: Weights {
                w: bits(&fit.w),
                wr: bits(&fit.wr),
            },
            provenance,
        }
    }

    /// Plain-text summary for terminals.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let pv = &self.provenance;
        let _ = writeln!(
            s,
            "{} fit of {} (n = {}, p = {})",
            self.method, pv.dataset, self.n, self.p
        );
        let width = self
            .coefficients
            .iter()
            .map(|c| c.name.len())
            .max()
            .unwrap_or(0)
            .max(11);
        let _ = writeln!(s, "  {:<width$}  {:>12}", "coefficient", "estimate");
        for c in &self.coefficients {
            let _ = writeln!(s, "  {:<width$}  {:>12.6}", c.name, c.value);
        }
        let _ = writeln!(s, "  sigma2       {:.6}", self.sigma2);
        let _ = writeln!(s, "  R2           {:.6}", self.r2);
        let _ = writeln!(s, "  adjusted R2  {:.6}", self.adjusted_r2);
        let outliers = if self.outlier_indices.is_empty() {
            "none".to_string()
        } else {
            self.outlier_indices
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        };
        let _ = writeln!(s, "  outliers     {outliers}");
        let _ = write!(
            s,
            "  delta1 = {}, delta2 = {}, sha256 = {}",
            pv.delta1, pv.delta2, pv.dataset_sha256
        );
        s
    }
}
