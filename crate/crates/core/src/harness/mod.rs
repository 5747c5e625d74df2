//! Monte-Carlo RMSE sweeps over SNR, array size, snapshot count or source
//! separation, with CSV and SVG output.

pub mod config;
pub mod output;
pub mod presets;
pub mod rmse;
pub mod snapshot_file;
pub mod sweep;

pub use config::{Algorithm, ExperimentConfig, OperatingPoint, SweepSpec, SweepVariable};
pub use output::{emit_outputs, format_g9, parse_csv, write_csv, CsvRow, OutputPaths, CSV_HEADER};
pub use rmse::{compute_rmse, pair_errors, summarize, RmseSummary};
pub use sweep::{
    run_estimator, run_sweep, run_trial, AlgorithmPoint, CurvePoint, RmseCurve, TrialRecord,
};
