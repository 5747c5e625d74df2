use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use doa_core::array::{sample_covariance, synthesize_snapshots};
use doa_core::baselines::stochastic_crb;
use doa_core::harness::snapshot_file::{read_snapshots, write_snapshots};
use doa_core::harness::{
    emit_outputs, format_g9, presets, run_estimator, run_sweep, Algorithm, ExperimentConfig,
};
use doa_core::wlslp::WlsConfig;
use doa_core::{DoaError, Result, SnapshotMatrix, SourceScenario, UlaGeometry};

#[derive(Parser)]
#[command(
    name = "doa",
    about = "DOA estimation for uniform linear arrays",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo RMSE sweep and write <out>.csv, <out>.svg and <out>.meta.txt
    Sweep {
        #[arg(long, required_unless_present = "preset", conflicts_with = "preset")]
        config: Option<PathBuf>,
        /// Built-in design: fig1..fig5
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (0 = all cores)
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Estimate angles from a DOA1 snapshot file
    Estimate {
        #[arg(long)]
        snapshots: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "wlslp")]
        algorithm: String,
        #[arg(long, default_value_t = 0.5)]
        spacing_ratio: f64,
    },
    /// Print the stochastic CRB at every sweep point of a config
    Crb {
        #[arg(long)]
        config: PathBuf,
    },
    /// Write a synthetic DOA1 snapshot file
    Synth {
        #[arg(long)]
        sensors: usize,
        /// Comma-separated angles in degrees
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        angles_deg: Vec<f64>,
        #[arg(long, allow_hyphen_values = true)]
        snr_db: f64,
        #[arg(long)]
        snapshots: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        spacing_ratio: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_config(path: &PathBuf) -> Result<ExperimentConfig> {
    ExperimentConfig::parse(&fs::read_to_string(path)?)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sweep {
            config,
            preset,
            out,
            trials,
            seed,
            jobs,
        } => {
            let mut cfg = match (config, preset) {
                (Some(path), _) => load_config(&path)?,
                (None, Some(name)) => presets::by_name(&name)
                    .ok_or_else(|| DoaError::Config(format!("unknown preset `{name}`")))?,
                (None, None) => unreachable!("clap enforces one of --config/--preset"),
            };
            if let Some(t) = trials {
                cfg.n_trials = t;
            }
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            let curve = run_sweep(&cfg, jobs)?;
            let paths = emit_outputs(&curve, &out)?;
            println!("{}", paths.csv.display());
            println!("{}", paths.svg.display());
            println!("{}", paths.meta.display());
        }
        Command::Estimate {
            snapshots,
            k,
            algorithm,
            spacing_ratio,
        } => {
            let algorithm: Algorithm = algorithm.parse()?;
            let data = read_snapshots(fs::File::open(&snapshots)?)?;
            let geometry = UlaGeometry::new(data.nrows(), spacing_ratio)?;
            let x = SnapshotMatrix::new(data, geometry)?;
            let r = sample_covariance(&x);
            let est = run_estimator(algorithm, &r, k, &geometry, &WlsConfig::default())?;
            let angles: Vec<String> = est.angles_deg().iter().map(|&a| format_g9(a)).collect();
            println!("{}", angles.join(","));
            for w in est.warnings() {
                eprintln!("warning: {w}");
            }
        }
        Command::Crb { config } => {
            let cfg = load_config(&config)?;
            let k = cfg.angles_deg.len();
            let mut header = vec![
                "sweep_variable".to_string(),
                "sweep_value".into(),
                "crb_deg".into(),
            ];
            header.extend((1..=k).map(|i| format!("crb_theta{i}_deg")));
            println!("{}", header.join(","));
            for (i, &value) in cfg.sweep.values().iter().enumerate() {
                let p = cfg.point(i)?;
                let crb = stochastic_crb(&p.scenario, &p.geometry, p.n_snapshots)?;
                let mut row = vec![
                    cfg.sweep.variable().to_string(),
                    format_g9(value),
                    format_g9(crb.pooled_deg()),
                ];
                row.extend(crb.per_angle_bound_deg.iter().map(|&b| format_g9(b)));
                println!("{}", row.join(","));
            }
        }
        Command::Synth {
            sensors,
            angles_deg,
            snr_db,
            snapshots,
            seed,
            spacing_ratio,
            out,
        } => {
            let geometry = UlaGeometry::new(sensors, spacing_ratio)?;
            let scenario = SourceScenario::from_snr(angles_deg, snr_db)?;
            let x = synthesize_snapshots(&scenario, &geometry, snapshots, seed)?;
            write_snapshots(fs::File::create(&out)?, x.data())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
