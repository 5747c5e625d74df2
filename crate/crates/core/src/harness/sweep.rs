use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::array::{sample_covariance, synthesize_snapshots, HermitianCovariance, UlaGeometry};
use crate::baselines::{root_music, stochastic_crb, unitary_esprit};
use crate::error::{DoaError, Result};
use crate::harness::config::{Algorithm, ExperimentConfig, SweepVariable};
use crate::harness::rmse::summarize;
use crate::rng::substream_seed;
use crate::warning::Warning;
use crate::wlslp::{estimate_doa_wlslp, DoaEstimate, WlsConfig};

/// Outcome of one estimator on one trial's snapshots.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial_index: usize,
    pub algorithm: Algorithm,
    /// Sorted angle estimates, or the failure message.
    pub estimates_deg: std::result::Result<Vec<f64>, String>,
    pub warnings: Vec<Warning>,
    pub elapsed: Duration,
}

/// Dispatches to the selected estimator.
pub fn run_estimator(
    algorithm: Algorithm,
    r: &HermitianCovariance,
    k: usize,
    geometry: &UlaGeometry,
    wls: &WlsConfig,
) -> Result<DoaEstimate> {
    match algorithm {
        Algorithm::WlsLp => estimate_doa_wlslp(r, k, geometry, wls),
        Algorithm::RootMusic => root_music(r, k, geometry),
        Algorithm::UnitaryEsprit => unitary_esprit(r, k, geometry),
    }
}

/// Runs every enabled estimator on one synthesized snapshot set.
///
/// The snapshots come from the substream of `(master_seed, point_index,
/// trial_index)`. Estimator errors become failed records.
pub fn run_trial(
    config: &ExperimentConfig,
    point_index: usize,
    trial_index: usize,
) -> Result<Vec<TrialRecord>> {
    let point = config.point(point_index)?;
    let seed = substream_seed(config.master_seed, point_index as u64, trial_index as u64);
    let snapshots =
        synthesize_snapshots(&point.scenario, &point.geometry, point.n_snapshots, seed)?;
    let r = sample_covariance(&snapshots);
    let k = point.scenario.source_count();
    let records = config
        .algorithms
        .iter()
        .map(|&algorithm| {
            let start = Instant::now();
            let result = run_estimator(algorithm, &r, k, &point.geometry, &config.wls);
            let elapsed = start.elapsed();
            let (estimates_deg, warnings) = match result {
                Ok(est)
                    if est.angles_deg().len() == k
                        && est.angles_deg().iter().all(|a| a.is_finite()) =>
                {
                    (Ok(est.angles_deg().to_vec()), est.warnings().to_vec())
                }
                Ok(est) => (
                    Err(format!(
                        "{} angles returned for {k} sources",
                        est.angles_deg().len()
                    )),
                    est.warnings().to_vec(),
                ),
                Err(e) => (Err(e.to_string()), Vec::new()),
            };
            TrialRecord {
                trial_index,
                algorithm,
                estimates_deg,
                warnings,
                elapsed,
            }
        })
        .collect();
    Ok(records)
}

/// Per-algorithm result at one sweep value.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmPoint {
    pub algorithm: Algorithm,
    /// `None` when every trial failed.
    pub rmse_deg: Option<f64>,
    pub std_error_deg: Option<f64>,
    pub n_trials: usize,
    pub n_failed: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub value: f64,
    /// Root of the mean per-source CRB variance; `None` if undefined (noise-free).
    pub crb_deg: Option<f64>,
    pub results: Vec<AlgorithmPoint>,
}

impl CurvePoint {
    pub fn result(&self, algorithm: Algorithm) -> Option<&AlgorithmPoint> {
        self.results.iter().find(|r| r.algorithm == algorithm)
    }
}

/// RMSE versus the swept variable for each algorithm, with the CRB.
#[derive(Debug, Clone, PartialEq)]
pub struct RmseCurve {
    pub variable: SweepVariable,
    pub algorithms: Vec<Algorithm>,
    pub points: Vec<CurvePoint>,
}

impl RmseCurve {
    /// RMSE series of one algorithm, in sweep order.
    pub fn series(&self, algorithm: Algorithm) -> Vec<Option<f64>> {
        self.points
            .iter()
            .map(|p| p.result(algorithm).and_then(|r| r.rmse_deg))
            .collect()
    }

    pub fn crb_series(&self) -> Vec<Option<f64>> {
        self.points.iter().map(|p| p.crb_deg).collect()
    }
}

fn run_point(config: &ExperimentConfig, index: usize, parallel: bool) -> Result<CurvePoint> {
    let point = config.point(index)?;
    let trials: Vec<Vec<TrialRecord>> = if parallel {
        (0..config.n_trials)
            .into_par_iter()
            .map(|t| run_trial(config, index, t))
            .collect::<Result<_>>()?
    } else {
        (0..config.n_trials)
            .map(|t| run_trial(config, index, t))
            .collect::<Result<_>>()?
    };
    let truth = point.scenario.angles_deg();
    let mut results = Vec::with_capacity(config.algorithms.len());
    for (slot, &algorithm) in config.algorithms.iter().enumerate() {
        let records: Vec<TrialRecord> = trials.iter().map(|t| t[slot].clone()).collect();
        let s = summarize(&records, truth)?;
        results.push(AlgorithmPoint {
            algorithm,
            rmse_deg: s.rmse_deg,
            std_error_deg: s.std_error_deg,
            n_trials: config.n_trials,
            n_failed: s.n_failed,
        });
    }
    let crb_deg = stochastic_crb(&point.scenario, &point.geometry, point.n_snapshots)
        .ok()
        .map(|c| c.pooled_deg());
    Ok(CurvePoint {
        value: config.sweep.values()[index],
        crb_deg,
        results,
    })
}

/// Runs `n_trials` trials at every sweep value on `jobs` threads
/// (0 = all cores). Aggregation follows trial order, so the result does not
/// depend on `jobs`.
pub fn run_sweep(config: &ExperimentConfig, jobs: usize) -> Result<RmseCurve> {
    config.validate()?;
    let indices = 0..config.point_count();
    let points = if jobs == 1 {
        indices
            .map(|i| run_point(config, i, false))
            .collect::<Result<Vec<_>>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| DoaError::Config(format!("cannot start thread pool: {e}")))?;
        pool.install(|| {
            indices
                .map(|i| run_point(config, i, true))
                .collect::<Result<Vec<_>>>()
        })?
    };
    Ok(RmseCurve {
        variable: config.sweep.variable(),
        algorithms: config.algorithms.clone(),
        points,
    })
}
