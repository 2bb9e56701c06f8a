//! Configuration-driven experiments and report emission.

pub mod config;
pub mod report;
pub mod run;
pub mod scan;

pub use config::{Check, Experiment, ExperimentConfig, OutputSpec, ReportFormat, SpectralFunction, SpectralQuantity, SymbolSpec};
pub use report::{emit_report, fmt_num, reports_to_csv, reports_to_json, sort_reports, CSV_HEADER};
pub use run::{build_symbol, execute, parse_config, run_check, run_config, validate_config, write_outcome, ConfigError, RunError, RunOptions, RunOutcome};
pub use scan::{resize, scan_constant_stability, scan_tsv, ScanOutcome, ScanRow, MAX_GROWTH};
