//! Argument parsing and subcommand drivers.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use shrinkreg::{ols_fit, sr_fit_with, sw_fit_with, Method, SrConfig};
use shrinkreg_sim::experiments::{EquivarianceRollup, MAX_FAILURE_RATE};
use shrinkreg_sim::output::{write_equivariance_csv, write_metrics_csv};
use shrinkreg_sim::{
    breakdown_run, equivariance_run, integer_grid, mse_table, refined_grid, ContaminationMode,
    MethodRollup, MetricsTable, RunOptions, Scenario, ScenarioConfig, TransformKind,
};

use crate::data::{builtin_dataset, load_csv, CsvOptions, BUILTIN};
use crate::error::{CliError, Result};
use crate::output::write_atomic;
use crate::report::{FitReport, Provenance};

#[derive(Debug, Parser)]
#[command(
    name = "shrinkreg",
    version,
    about = "Shrinkage reweighted robust regression"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Print machine-readable JSON instead of a text summary.
    #[arg(long, global = true)]
    pub json: bool,

    /// Directory for output artifacts.
    #[arg(long, global = true, default_value = "results")]
    pub out: PathBuf,

    /// Upper-tail probability of the joint-distance cutoff.
    #[arg(long, global = true, default_value_t = 0.025)]
    pub delta1: f64,

    /// Upper-tail probability of the residual cutoff.
    #[arg(long, global = true, default_value_t = 0.01)]
    pub delta2: f64,

    /// Worker threads for simulations (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a regression to an embedded dataset or a CSV file.
    Fit(FitArgs),
    /// Monte-Carlo MSE and bias of the estimators.
    Simulate(SimulateArgs),
    /// Empirical regression, y- and x-equivariance.
    Equivariance(EquivarianceArgs),
    /// High-contamination sweep of SR against least squares.
    Breakdown(BreakdownArgs),
    /// List the embedded datasets.
    Datasets,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Sr,
    Sw,
    Ols,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Sr => Method::Sr,
            MethodArg::Sw => Method::Sw,
            MethodArg::Ols => Method::Ols,
        }
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Embedded dataset name (see `datasets`).
    #[arg(long, conflicts_with = "csv", required_unless_present = "csv")]
    pub dataset: Option<String>,

    /// CSV file; the response is the last column unless --response is given.
    #[arg(long)]
    pub csv: Option<PathBuf>,

    /// The CSV file has no header row.
    #[arg(long, requires = "csv")]
    pub no_header: bool,

    /// Response column name or 1-based position.
    #[arg(long, requires = "csv")]
    pub response: Option<String>,

    #[arg(long, value_enum, default_value = "sr")]
    pub method: MethodArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioArg {
    Ne,
    Te,
    Neo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ContaminationArg {
    Bernoulli,
    FixedCount,
}

#[derive(Debug, Clone, Args)]
pub struct DesignArgs {
    #[arg(long, default_value_t = 5)]
    pub p: usize,

    #[arg(long, default_value_t = 100)]
    pub n: usize,

    /// Replications.
    #[arg(long, default_value_t = 200)]
    pub m: usize,

    /// Carrier contamination centers: `integer`, `refined` or a comma list.
    /// Defaults to `refined` for breakdown runs and `integer` otherwise.
    #[arg(long)]
    pub lambda_grid: Option<String>,

    /// Response contamination centers, in the same format.
    #[arg(long)]
    pub k_grid: Option<String>,

    #[arg(long, value_enum, default_value = "bernoulli")]
    pub contamination: ContaminationArg,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value = "ne")]
    pub scenario: ScenarioArg,

    /// Contamination fraction (contaminated scenario only).
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,

    #[arg(long, value_enum, value_delimiter = ',', default_value = "sr,ols")]
    pub methods: Vec<MethodArg>,

    #[command(flatten)]
    pub design: DesignArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransformArg {
    RegressionY,
    X,
}

#[derive(Debug, Args)]
pub struct EquivarianceArgs {
    #[arg(long, value_enum, default_value = "regression-y")]
    pub transform: TransformArg,

    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,

    #[arg(long, value_enum, value_delimiter = ',', default_value = "sr,ols")]
    pub methods: Vec<MethodArg>,

    #[command(flatten)]
    pub design: DesignArgs,
}

#[derive(Debug, Args)]
pub struct BreakdownArgs {
    #[arg(long, default_value_t = 0.45)]
    pub delta: f64,

    #[command(flatten)]
    pub design: DesignArgs,
}

/// Replay information attached to every simulation summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunProvenance {
    pub seed: u64,
    pub delta1: f64,
    pub delta2: f64,
    pub version: &'static str,
}

#[derive(Debug, Serialize)]
pub struct MetricsSummary<'a> {
    pub command: &'static str,
    pub config: &'a ScenarioConfig,
    pub provenance: RunProvenance,
    /// Rollups keyed by lower-case method name.
    pub methods: BTreeMap<String, &'a MethodRollup>,
    /// `MSE(OLS) / MSE(method)`; empty for the contaminated design.
    pub efficiency: BTreeMap<String, f64>,
    pub failures: usize,
    pub max_failure_rate: f64,
    pub valid: bool,
    pub metrics_csv: String,
}

#[derive(Debug, Serialize)]
pub struct EquivarianceSummary<'a> {
    pub command: &'static str,
    pub config: &'a ScenarioConfig,
    pub transform: TransformKind,
    pub provenance: RunProvenance,
    pub methods: BTreeMap<String, &'a EquivarianceRollup>,
    pub valid: bool,
    pub metrics_csv: String,
}

impl GlobalArgs {
    pub fn sr_config(&self) -> Result<SrConfig> {
        let cfg = SrConfig {
            delta1: self.delta1,
            delta2: self.delta2,
            ..SrConfig::default()
        };
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }

    fn run_options(&self) -> Result<RunOptions> {
        Ok(RunOptions {
            threads: self.threads,
            sr: self.sr_config()?,
        })
    }

    fn provenance(&self) -> RunProvenance {
        RunProvenance {
            seed: self.seed,
            delta1: self.delta1,
            delta2: self.delta2,
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

/// `integer`, `refined` or comma-separated numbers.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    match text.trim() {
        "integer" => Ok(integer_grid()),
        "refined" => Ok(refined_grid()),
        list => list
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| CliError::Usage(format!("bad grid value {v:?} in {text:?}")))
            })
            .collect(),
    }
}

fn contaminated_config(
    design: &DesignArgs,
    delta: f64,
    seed: u64,
    default_grid: &str,
) -> Result<ScenarioConfig> {
    let grid = |g: &Option<String>| parse_grid(g.as_deref().unwrap_or(default_grid));
    let mut cfg = ScenarioConfig::contaminated(
        design.p,
        design.n,
        design.m,
        delta,
        grid(&design.lambda_grid)?,
        grid(&design.k_grid)?,
        seed,
    );
    cfg.contamination = match design.contamination {
        ContaminationArg::Bernoulli => ContaminationMode::Bernoulli,
        ContaminationArg::FixedCount => ContaminationMode::FixedCount,
    };
    Ok(cfg)
}

fn method_list(methods: &[MethodArg]) -> Result<Vec<Method>> {
    let mut out: Vec<Method> = Vec::new();
    for &m in methods {
        if !out.contains(&m.into()) {
            out.push(m.into());
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage("at least one method is required".into()));
    }
    Ok(out)
}

fn display_path(p: &Path) -> String {
    p.display().to_string()
}

pub fn run<W: Write>(cli: &Cli, out: &mut W) -> Result<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Fit(args) => cmd_fit(g, args, out),
        Command::Simulate(args) => cmd_simulate(g, args, out),
        Command::Equivariance(args) => cmd_equivariance(g, args, out),
        Command::Breakdown(args) => cmd_breakdown(g, args, out),
        Command::Datasets => cmd_datasets(g, out),
    }
}

fn emit<W: Write>(out: &mut W, text: &str) -> Result<()> {
    writeln!(out, "{text}").map_err(|source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

pub fn fit_report(g: &GlobalArgs, args: &FitArgs) -> Result<FitReport> {
    let sr = g.sr_config()?;
    let loaded = match (&args.dataset, &args.csv) {
        (Some(name), _) => builtin_dataset(name)?,
        (None, Some(path)) => load_csv(
            path,
            &CsvOptions {
                header: !args.no_header,
                response: args.response.clone(),
            },
        )?,
        (None, None) => return Err(CliError::Usage("give --dataset or --csv".into())),
    };
    let data = &loaded.data;
    let fit = match Method::from(args.method) {
        Method::Ols => ols_fit(data)?,
        Method::Sw => sw_fit_with(data, &sr)?,
        Method::Sr => sr_fit_with(data, &sr)?,
    };
    let provenance = Provenance::new(&loaded.name, &loaded.sha256, &sr, g.seed);
    Ok(FitReport::new(data, &fit, provenance))
}

fn cmd_fit<W: Write>(g: &GlobalArgs, args: &FitArgs, out: &mut W) -> Result<()> {
    let report = fit_report(g, args)?;
    let json = serde_json::to_string_pretty(&report)?;
    if g.json {
        emit(out, &json)
    } else {
        emit(out, &report.render())
    }
}

fn metrics_summary<'a>(
    command: &'static str,
    g: &GlobalArgs,
    table: &'a MetricsTable,
    csv: &Path,
) -> MetricsSummary<'a> {
    let methods = table
        .rollups
        .iter()
        .map(|r| (r.method.to_ascii_lowercase(), r))
        .collect();
    let efficiency = if table.config.scenario == Scenario::Neo {
        BTreeMap::new()
    } else {
        [Method::Sr, Method::Sw, Method::Ols]
            .into_iter()
            .filter_map(|m| Some((m.as_str().to_ascii_lowercase(), table.efficiency(m)?)))
            .collect()
    };
    MetricsSummary {
        command,
        config: &table.config,
        provenance: g.provenance(),
        methods,
        efficiency,
        failures: table.failures,
        max_failure_rate: MAX_FAILURE_RATE,
        valid: table.valid,
        metrics_csv: display_path(csv),
    }
}

fn write_table<W: Write>(
    command: &'static str,
    stem: &str,
    g: &GlobalArgs,
    table: &MetricsTable,
    out: &mut W,
) -> Result<()> {
    let csv_path = g.out.join(format!("{stem}.csv"));
    let json_path = g.out.join(format!("{stem}.json"));
    let mut csv = Vec::new();
    write_metrics_csv(&table.cells, &mut csv)?;
    write_atomic(&csv_path, &csv)?;
    let summary = metrics_summary(command, g, table, &csv_path);
    let json = serde_json::to_string_pretty(&summary)?;
    write_atomic(&json_path, format!("{json}\n").as_bytes())?;
    if g.json {
        return emit(out, &json);
    }
    let mut text = format!(
        "{command}: scenario {}, p = {}, n = {}, M = {}, delta = {}, seed = {}",
        table.config.scenario.as_str(),
        table.config.p,
        table.config.n,
        table.config.m,
        table.config.delta,
        g.seed
    );
    for r in &table.rollups {
        text.push_str(&format!(
            "\n  {:<4} MMMSE(beta) {:.6}  MMBias(beta) {:.6}  MMMSE(alpha) {:.6}",
            r.method, r.mmmse_beta, r.mmbias_beta, r.mmmse_alpha
        ));
    }
    for (m, e) in &summary.efficiency {
        text.push_str(&format!("\n  efficiency({m}) {e:.4}"));
    }
    if !table.valid {
        text.push_str(&format!(
            "\n  INVALID: {} failed fits exceed the {:.0}% budget in some cell",
            table.failures,
            MAX_FAILURE_RATE * 100.0
        ));
    }
    text.push_str(&format!(
        "\n  wrote {} and {}",
        display_path(&csv_path),
        display_path(&json_path)
    ));
    emit(out, &text)
}

fn cmd_simulate<W: Write>(g: &GlobalArgs, args: &SimulateArgs, out: &mut W) -> Result<()> {
    let d = &args.design;
    let config = match args.scenario {
        ScenarioArg::Ne => ScenarioConfig::clean(Scenario::Ne, d.p, d.n, d.m, g.seed),
        ScenarioArg::Te => ScenarioConfig::clean(Scenario::Te, d.p, d.n, d.m, g.seed),
        ScenarioArg::Neo => contaminated_config(d, args.delta, g.seed, "integer")?,
    };
    let table = mse_table(&config, &method_list(&args.methods)?, &g.run_options()?)?;
    let stem = format!("simulate_{}", config.scenario.as_str());
    write_table("simulate", &stem, g, &table, out)
}

fn cmd_breakdown<W: Write>(g: &GlobalArgs, args: &BreakdownArgs, out: &mut W) -> Result<()> {
    let config = contaminated_config(&args.design, args.delta, g.seed, "refined")?;
    let table = breakdown_run(&config, &g.run_options()?)?;
    write_table("breakdown", "breakdown", g, &table, out)
}

fn cmd_equivariance<W: Write>(g: &GlobalArgs, args: &EquivarianceArgs, out: &mut W) -> Result<()> {
    let config = contaminated_config(&args.design, args.delta, g.seed, "integer")?;
    let kind = match args.transform {
        TransformArg::RegressionY => TransformKind::RegressionY,
        TransformArg::X => TransformKind::X,
    };
    let table = equivariance_run(
        &config,
        kind,
        &method_list(&args.methods)?,
        &g.run_options()?,
    )?;
    let stem = match kind {
        TransformKind::RegressionY => "equivariance_regression_y",
        TransformKind::X => "equivariance_x",
    };
    let csv_path = g.out.join(format!("{stem}.csv"));
    let json_path = g.out.join(format!("{stem}.json"));
    let mut csv = Vec::new();
    write_equivariance_csv(&table, &mut csv)?;
    write_atomic(&csv_path, &csv)?;
    let summary = EquivarianceSummary {
        command: "equivariance",
        config: &table.config,
        transform: kind,
        provenance: g.provenance(),
        methods: table
            .rollups
            .iter()
            .map(|r| (r.method.to_ascii_lowercase(), r))
            .collect(),
        valid: table.valid,
        metrics_csv: display_path(&csv_path),
    };
    let json = serde_json::to_string_pretty(&summary)?;
    write_atomic(&json_path, format!("{json}\n").as_bytes())?;
    if g.json {
        return emit(out, &json);
    }
    let mut text = format!(
        "equivariance ({stem}): p = {}, n = {}, M = {}, delta = {}, seed = {}",
        config.p, config.n, config.m, config.delta, g.seed
    );
    for r in &table.rollups {
        text.push_str(&format!("\n  {:<4} max MMSE {:.3e}", r.method, r.max_mmse));
    }
    text.push_str(&format!(
        "\n  wrote {} and {}",
        display_path(&csv_path),
        display_path(&json_path)
    ));
    emit(out, &text)
}

#[derive(Serialize)]
struct DatasetEntry {
    name: &'static str,
    description: &'static str,
    n: usize,
    p: usize,
    sha256: String,
}

fn cmd_datasets<W: Write>(g: &GlobalArgs, out: &mut W) -> Result<()> {
    let mut entries = Vec::new();
    for (name, description, _) in BUILTIN {
        let loaded = builtin_dataset(name)?;
        entries.push(DatasetEntry {
            name,
            description,
            n: loaded.data.n(),
            p: loaded.data.p(),
            sha256: loaded.sha256,
        });
    }
    if g.json {
        return emit(out, &serde_json::to_string_pretty(&entries)?);
    }
    let lines: Vec<String> = entries
        .iter()
        .map(|e| format!("{:<6} {}", e.name, e.description))
        .collect();
    emit(out, &lines.join("\n"))
}
