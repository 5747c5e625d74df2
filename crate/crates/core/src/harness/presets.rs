//! The five published experiment designs.

use crate::harness::config::{ExperimentConfig, SweepSpec, SweepVariable};

fn snr_grid() -> Vec<f64> {
    (0..=15).map(|i| -10.0 + 2.0 * i as f64).collect()
}

/// RMSE versus SNR, θ = [6°, 45°], M = 10, N = 50.
pub fn snr_sweep_wide() -> ExperimentConfig {
    let sweep = SweepSpec::new(SweepVariable::SnrDb, snr_grid()).expect("valid grid");
    ExperimentConfig::new(10, vec![6.0, 45.0], 50, 0.0, sweep)
}

/// RMSE versus SNR, θ = [30°, 45°], M = 10, N = 50.
pub fn snr_sweep_close() -> ExperimentConfig {
    let sweep = SweepSpec::new(SweepVariable::SnrDb, snr_grid()).expect("valid grid");
    ExperimentConfig::new(10, vec![30.0, 45.0], 50, 0.0, sweep)
}

/// RMSE versus sensor count M ∈ {6, 8, …, 20} at 5 dB, N = 50.
pub fn sensor_sweep() -> ExperimentConfig {
    let values = (6..=20).step_by(2).map(f64::from).collect();
    let sweep = SweepSpec::new(SweepVariable::SensorCount, values).expect("valid grid");
    ExperimentConfig::new(10, vec![6.0, 45.0], 50, 5.0, sweep)
}

/// RMSE versus snapshot count N ∈ {100, 200, 500, 1000} at 5 dB, M = 10.
pub fn snapshot_sweep() -> ExperimentConfig {
    let sweep = SweepSpec::new(SweepVariable::NSnapshots, vec![100.0, 200.0, 500.0, 1000.0])
        .expect("valid grid");
    ExperimentConfig::new(10, vec![6.0, 45.0], 50, 5.0, sweep)
}

/// RMSE versus θ₂ ∈ {10°, 20°, …, 80°} with θ₁ = 6° at 10 dB, M = 10, N = 50.
pub fn separation_sweep() -> ExperimentConfig {
    let values = (1..=8).map(|i| 10.0 * i as f64).collect();
    let sweep = SweepSpec::new(SweepVariable::Theta2Deg, values).expect("valid grid");
    ExperimentConfig::new(10, vec![6.0, 45.0], 50, 10.0, sweep)
}

/// Looks a preset up by name.
pub fn by_name(name: &str) -> Option<ExperimentConfig> {
    match name {
        "fig1" | "snr-wide" => Some(snr_sweep_wide()),
        "fig2" | "snr-close" => Some(snr_sweep_close()),
        "fig3" | "sensors" => Some(sensor_sweep()),
        "fig4" | "snapshots" => Some(snapshot_sweep()),
        "fig5" | "separation" => Some(separation_sweep()),
        _ => None,
    }
}
