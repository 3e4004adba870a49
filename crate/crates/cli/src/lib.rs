//! Experiment runner for the `pseudosym` integrators: named presets,
//! configuration documents and deterministic CSV/JSON output.

pub mod config;
mod error;
pub mod presets;
pub mod table;

pub use config::{parse_config, BaseChoice, ExperimentConfig, MethodSpec, Preset, ProblemKind};
pub use error::CliError;
pub use presets::{run, write_output, RunOutput};
pub use table::{Cell, ResultTable};
