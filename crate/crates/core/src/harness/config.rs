//! Experiment configuration and its flat `key = value` file format.
//!
//! ```text
//! # Fig. 1 style SNR sweep
//! sensors = 10
//! spacing_ratio = 0.5
//! angles_deg = 6, 45
//! snapshots = 50
//! trials = 200
//! seed = 1
//! algorithms = wlslp, root_music, unitary_esprit
//! sweep.variable = snr_db
//! sweep.values = -10, -8, -6
//! ```
//!
//! `snr_db` is required unless it is the swept variable. Blank lines and
//! lines starting with `#` are ignored; unknown or repeated keys are errors.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::array::{SourceScenario, UlaGeometry};
use crate::error::{DoaError, Result};
use crate::wlslp::WlsConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    WlsLp,
    RootMusic,
    UnitaryEsprit,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [
        Algorithm::WlsLp,
        Algorithm::RootMusic,
        Algorithm::UnitaryEsprit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::WlsLp => "wlslp",
            Algorithm::RootMusic => "root_music",
            Algorithm::UnitaryEsprit => "unitary_esprit",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = DoaError;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| DoaError::Config(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    SnrDb,
    SensorCount,
    NSnapshots,
    Theta2Deg,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::SnrDb => "snr_db",
            SweepVariable::SensorCount => "sensor_count",
            SweepVariable::NSnapshots => "n_snapshots",
            SweepVariable::Theta2Deg => "theta2_deg",
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVariable {
    type Err = DoaError;

    fn from_str(s: &str) -> Result<Self> {
        [
            SweepVariable::SnrDb,
            SweepVariable::SensorCount,
            SweepVariable::NSnapshots,
            SweepVariable::Theta2Deg,
        ]
        .into_iter()
        .find(|v| v.name() == s)
        .ok_or_else(|| DoaError::Config(format!("unknown sweep variable `{s}`")))
    }
}

/// The swept axis and its values (non-empty, strictly monotone).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    variable: SweepVariable,
    values: Vec<f64>,
}

impl SweepSpec {
    pub fn new(variable: SweepVariable, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(DoaError::Config("sweep needs at least one value".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(DoaError::Config("sweep values must be finite".into()));
        }
        let increasing = values.windows(2).all(|w| w[1] > w[0]);
        let decreasing = values.windows(2).all(|w| w[1] < w[0]);
        if !(increasing || decreasing) {
            return Err(DoaError::Config(
                "sweep values must be strictly monotone".into(),
            ));
        }
        if matches!(
            variable,
            SweepVariable::SensorCount | SweepVariable::NSnapshots
        ) && values.iter().any(|v| v.fract() != 0.0 || *v < 1.0)
        {
            return Err(DoaError::Config(format!(
                "{variable} sweep values must be positive integers"
            )));
        }
        Ok(Self { variable, values })
    }

    pub fn variable(&self) -> SweepVariable {
        self.variable
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// One Monte-Carlo experiment: a base scenario plus one swept axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub sensor_count: usize,
    pub spacing_ratio: f64,
    pub angles_deg: Vec<f64>,
    pub source_power: f64,
    pub n_snapshots: usize,
    /// Used when SNR is not the swept variable.
    pub snr_db: f64,
    pub n_trials: usize,
    pub master_seed: u64,
    pub algorithms: Vec<Algorithm>,
    pub sweep: SweepSpec,
    pub wls: WlsConfig,
    /// Replaces the SNR-derived noise power (0 gives noise-free trials).
    pub noise_power_override: Option<f64>,
}

/// Geometry, scenario and snapshot count at one sweep value.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatingPoint {
    pub geometry: UlaGeometry,
    pub scenario: SourceScenario,
    pub n_snapshots: usize,
}

impl ExperimentConfig {
    /// All three estimators, 200 trials, unit source power, default WLS settings.
    pub fn new(
        sensor_count: usize,
        angles_deg: Vec<f64>,
        n_snapshots: usize,
        snr_db: f64,
        sweep: SweepSpec,
    ) -> Self {
        Self {
            sensor_count,
            spacing_ratio: 0.5,
            angles_deg,
            source_power: 1.0,
            n_snapshots,
            snr_db,
            n_trials: 200,
            master_seed: 1,
            algorithms: Algorithm::ALL.to_vec(),
            sweep,
            wls: WlsConfig::default(),
            noise_power_override: None,
        }
    }

    /// Checks every sweep point before any trial runs.
    pub fn validate(&self) -> Result<()> {
        if self.n_trials == 0 {
            return Err(DoaError::Config("trials must be at least 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(DoaError::Config(
                "at least one algorithm is required".into(),
            ));
        }
        for (i, a) in self.algorithms.iter().enumerate() {
            if self.algorithms[..i].contains(a) {
                return Err(DoaError::Config(format!("algorithm `{a}` listed twice")));
            }
        }
        if self.sweep.variable == SweepVariable::Theta2Deg && self.angles_deg.len() != 2 {
            return Err(DoaError::Config(
                "theta2_deg sweep requires exactly two sources".into(),
            ));
        }
        for index in 0..self.sweep.values.len() {
            self.point(index)?;
        }
        Ok(())
    }

    pub fn point_count(&self) -> usize {
        self.sweep.values.len()
    }

    /// Operating point at sweep index `index`.
    pub fn point(&self, index: usize) -> Result<OperatingPoint> {
        let value = *self
            .sweep
            .values
            .get(index)
            .ok_or_else(|| DoaError::Config(format!("sweep index {index} out of range")))?;
        let mut sensors = self.sensor_count;
        let mut snapshots = self.n_snapshots;
        let mut snr_db = self.snr_db;
        let mut angles = self.angles_deg.clone();
        match self.sweep.variable {
            SweepVariable::SnrDb => snr_db = value,
            SweepVariable::SensorCount => sensors = value as usize,
            SweepVariable::NSnapshots => snapshots = value as usize,
            SweepVariable::Theta2Deg => {
                if angles.len() != 2 {
                    return Err(DoaError::Config(
                        "theta2_deg sweep requires exactly two sources".into(),
                    ));
                }
                angles[1] = value;
            }
        }
        if snapshots == 0 {
            return Err(DoaError::Config("snapshots must be at least 1".into()));
        }
        if !snr_db.is_finite() {
            return Err(DoaError::Config("snr_db must be finite".into()));
        }
        let geometry = UlaGeometry::new(sensors, self.spacing_ratio)
            .map_err(|e| DoaError::Config(e.to_string()))?;
        let noise = self
            .noise_power_override
            .unwrap_or(self.source_power * 10f64.powf(-snr_db / 10.0));
        let scenario = SourceScenario::new(angles, self.source_power, noise)
            .map_err(|e| DoaError::Config(e.to_string()))?;
        scenario
            .validate_against(&geometry)
            .map_err(|e| DoaError::Config(e.to_string()))?;
        Ok(OperatingPoint {
            geometry,
            scenario,
            n_snapshots: snapshots,
        })
    }

    /// Parses the flat key/value format.
    pub fn parse(text: &str) -> Result<Self> {
        const KEYS: [&str; 10] = [
            "sensors",
            "spacing_ratio",
            "angles_deg",
            "snapshots",
            "trials",
            "seed",
            "algorithms",
            "sweep.variable",
            "sweep.values",
            "snr_db",
        ];
        let mut entries: BTreeMap<&str, &str> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                DoaError::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(DoaError::Config(format!(
                    "line {}: unknown key `{key}`",
                    lineno + 1
                )));
            }
            if entries.insert(key, value.trim()).is_some() {
                return Err(DoaError::Config(format!(
                    "line {}: key `{key}` repeated",
                    lineno + 1
                )));
            }
        }
        let required = |key: &str| {
            entries
                .get(key)
                .copied()
                .ok_or_else(|| DoaError::Config(format!("missing key `{key}`")))
        };

        let sensor_count = parse_scalar(required("sensors")?, "sensors")?;
        let angles_deg = parse_list(required("angles_deg")?, "angles_deg")?;
        let n_snapshots = parse_scalar(required("snapshots")?, "snapshots")?;
        let variable: SweepVariable = required("sweep.variable")?.parse()?;
        let values = parse_list(required("sweep.values")?, "sweep.values")?;
        let sweep = SweepSpec::new(variable, values)?;
        let snr_db = match entries.get("snr_db") {
            Some(v) => parse_scalar(v, "snr_db")?,
            None if variable == SweepVariable::SnrDb => 0.0,
            None => return Err(DoaError::Config("missing key `snr_db`".into())),
        };

        let mut config = Self::new(sensor_count, angles_deg, n_snapshots, snr_db, sweep);
        if let Some(v) = entries.get("spacing_ratio") {
            config.spacing_ratio = parse_scalar(v, "spacing_ratio")?;
        }
        if let Some(v) = entries.get("trials") {
            config.n_trials = parse_scalar(v, "trials")?;
        }
        if let Some(v) = entries.get("seed") {
            config.master_seed = parse_scalar(v, "seed")?;
        }
        if let Some(v) = entries.get("algorithms") {
            config.algorithms = v
                .split(',')
                .map(|s| s.trim().parse())
                .collect::<Result<Vec<_>>>()?;
        }
        config.validate()?;
        Ok(config)
    }

    /// Renders the config in the format accepted by [`ExperimentConfig::parse`].
    pub fn to_config_text(&self) -> String {
        let list = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let mut s = String::new();
        s += &format!("sensors = {}\n", self.sensor_count);
        s += &format!("spacing_ratio = {}\n", self.spacing_ratio);
        s += &format!("angles_deg = {}\n", list(&self.angles_deg));
        s += &format!("snapshots = {}\n", self.n_snapshots);
        s += &format!("snr_db = {}\n", self.snr_db);
        s += &format!("trials = {}\n", self.n_trials);
        s += &format!("seed = {}\n", self.master_seed);
        let algs: Vec<&str> = self.algorithms.iter().map(|a| a.name()).collect();
        s += &format!("algorithms = {}\n", algs.join(", "));
        s += &format!("sweep.variable = {}\n", self.sweep.variable);
        s += &format!("sweep.values = {}\n", list(&self.sweep.values));
        s
    }
}

fn parse_scalar<T: FromStr>(s: &str, key: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| DoaError::Config(format!("invalid value `{s}` for `{key}`")))
}

fn parse_list(s: &str, key: &str) -> Result<Vec<f64>> {
    s.split(',').map(|item| parse_scalar(item, key)).collect()
}
