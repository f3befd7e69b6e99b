//! Config-driven decoherence analyses on top of `gqm-core`.

pub mod analysis;
pub mod config;
pub mod model;
pub mod presets;
pub mod report;

pub use analysis::{run_analysis, run_oracle, AnalysisError, AnalysisReport};
pub use config::{load_config, AnalysisConfig, ConfigError, OutputFormat};
pub use report::{emit_report, read_report};

/// Directory for reports when neither `--out` nor `output.path` is given.
pub const OUTPUT_DIR_VAR: &str = "GQM_OUTPUT_DIR";

/// Tolerance below which `oracle` reports agreement.
pub const ORACLE_TOLERANCE: f64 = 1e-9;
