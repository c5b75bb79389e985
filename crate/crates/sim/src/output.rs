use std::io::Write;

use crate::error::Result;
use crate::experiments::EquivarianceTable;
use crate::metrics::MetricsCell;

pub const METRICS_COLUMNS: [&str; 11] = [
    "method",
    "scenario",
    "p",
    "n",
    "delta",
    "lambda",
    "k",
    "mse_beta",
    "mse_alpha",
    "bias2_beta",
    "bias2_alpha",
];

/// One CSV row per cell in the fixed column order of [`METRICS_COLUMNS`].
pub fn write_metrics_csv<W: Write>(cells: &[MetricsCell], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(METRICS_COLUMNS)?;
    for c in cells {
        w.write_record([
            c.method.clone(),
            c.scenario.clone(),
            c.p.to_string(),
            c.n.to_string(),
            c.delta.to_string(),
            c.lambda.to_string(),
            c.k.to_string(),
            c.mse_beta.to_string(),
            c.mse_alpha.to_string(),
            c.bias2_beta.to_string(),
            c.bias2_alpha.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_equivariance_csv<W: Write>(table: &EquivarianceTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "method",
        "transform",
        "p",
        "n",
        "delta",
        "lambda",
        "k",
        "mse_deviation",
        "max_deviation",
    ])?;
    let transform = match table.transform {
        crate::transform::TransformKind::RegressionY => "regression_y",
        crate::transform::TransformKind::X => "x",
    };
    for c in &table.cells {
        w.write_record([
            c.method.clone(),
            transform.to_string(),
            table.config.p.to_string(),
            table.config.n.to_string(),
            table.config.delta.to_string(),
            c.lambda.to_string(),
            c.k.to_string(),
            c.mse_deviation.to_string(),
            c.max_deviation.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
