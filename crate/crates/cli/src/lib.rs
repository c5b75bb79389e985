//! Command-line front end: dataset ingestion, the embedded star and HBK
//! datasets, fits with JSON reports, and the simulation drivers.

pub mod cli;
pub mod data;
pub mod error;
pub mod output;
pub mod report;

pub use data::{builtin_dataset, load_csv, parse_csv, CsvOptions, LoadedDataset};
pub use error::{CliError, Result};
pub use report::{FitReport, Provenance};
