//! Configurable Monte Carlo experiments and their CSV output.
//!
//! An [`ExperimentConfig`] is read from TOML (see `configs/default.toml` for
//! every field and its default), run by [`run_experiment`], and written with
//! [`write_results`]. Named presets reproduce the headline results.

mod config;
mod experiment;
mod presets;
mod results;

pub use config::{
    AllocationMode, AllocationSection, BerSection, ExperimentConfig, ExperimentKind, Fading,
    FdsrSection, RisChannel, RisSection, SweepSection, SystemSection, DEFAULT_CONFIG,
    MIN_BER_TRIALS,
};
pub use experiment::{draw_state, run_experiment, run_experiment_with};
pub use presets::{preset, PRESETS};
pub use results::{read_results, write_results, CsvSink, ResultRow, CSV_HEADER};
