//! Experiment configuration: a flat `key = value` file, overridable by flags.
//!
//! ```text
//! # lines starting with '#' are comments
//! scenario = ain_relay,tdma
//! m = 4
//! snr = 60:100:10
//! channels = 200
//! seed = 1
//! ```
//!
//! Recognized keys: `scenario`, `m`, `snr`, `channels`, `noise`, `seed`,
//! `mode`, `diversity`, `gamma`, `epsilon`, `symbols`, `budget`, `out`,
//! `format`. Keys left out take the defaults of [`ExperimentConfig::default`];
//! `snr` and `mode` default per command.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use ain_core::dof::Scenario;
use ain_core::link_sim::RelayMode;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrGrid {
    pub start_db: f64,
    pub stop_db: f64,
    pub step_db: f64,
}

impl SnrGrid {
    pub const fn new(start_db: f64, stop_db: f64, step_db: f64) -> Self {
        SnrGrid { start_db, stop_db, step_db }
    }

    /// Grid points from start to stop inclusive.
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop_db - self.start_db) / self.step_db + 1e-9).floor() as usize;
        (0..=n).map(|k| self.start_db + k as f64 * self.step_db).collect()
    }
}

impl FromStr for SnrGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected start:stop:step, got '{s}'"));
        }
        let num = |p: &str| p.trim().parse::<f64>().map_err(|_| format!("'{p}' is not a number"));
        let g = SnrGrid::new(num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if ![g.start_db, g.stop_db, g.step_db].iter().all(|x| x.is_finite()) {
            return Err("grid values must be finite".into());
        }
        if g.step_db <= 0.0 {
            return Err(format!("step must be positive, got {}", g.step_db));
        }
        if g.stop_db < g.start_db {
            return Err(format!("stop {} is below start {}", g.stop_db, g.start_db));
        }
        Ok(g)
    }
}

impl fmt::Display for SnrGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start_db, self.stop_db, self.step_db)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format '{s}' (expected csv or json)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

pub const DEFAULT_SWEEP_GRID: SnrGrid = SnrGrid::new(60.0, 100.0, 10.0);
pub const DEFAULT_SCALAR_GRID: SnrGrid = SnrGrid::new(60.0, 120.0, 10.0);

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenarios: Vec<Scenario>,
    pub m: usize,
    pub snr: Option<SnrGrid>,
    pub n_channels: usize,
    pub n_noise: usize,
    pub seed: u64,
    pub mode: Option<RelayMode>,
    pub diversity: bool,
    pub gamma: f64,
    pub epsilon: f64,
    pub n_symbols: usize,
    pub budget: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            scenarios: vec![Scenario::AinRelay],
            m: 4,
            snr: None,
            n_channels: 200,
            n_noise: 20,
            seed: 1,
            mode: None,
            diversity: false,
            gamma: 1.0,
            epsilon: 0.5,
            n_symbols: 10_000,
            budget: 10_000_000,
            out: None,
            format: Format::Csv,
        }
    }
}

fn field<T: FromStr>(key: &str, value: &str) -> CliResult<T>
where
    T::Err: fmt::Display,
{
    value
        .parse::<T>()
        .map_err(|e| CliError::Usage(format!("{key}: invalid value '{value}': {e}")))
}

impl ExperimentConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        let value = value.trim();
        match key {
            "scenario" => {
                self.scenarios = value
                    .split(',')
                    .map(|s| field::<Scenario>(key, s.trim()))
                    .collect::<CliResult<_>>()?;
                if self.scenarios.is_empty() {
                    return Err(CliError::Usage("scenario: empty list".into()));
                }
            }
            "m" => self.m = field(key, value)?,
            "snr" => self.snr = Some(field(key, value)?),
            "channels" => self.n_channels = field(key, value)?,
            "noise" => self.n_noise = field(key, value)?,
            "seed" => self.seed = field(key, value)?,
            "mode" => self.mode = Some(field(key, value)?),
            "diversity" => self.diversity = field(key, value)?,
            "gamma" => self.gamma = field(key, value)?,
            "epsilon" => self.epsilon = field(key, value)?,
            "symbols" => self.n_symbols = field(key, value)?,
            "budget" => self.budget = field(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = field(key, value)?,
            _ => return Err(CliError::Usage(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let mut cfg = ExperimentConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", i + 1)))?;
            cfg.set(key.trim(), value).map_err(|e| match e {
                CliError::Usage(m) => CliError::Usage(format!("config line {}: {m}", i + 1)),
                other => other,
            })?;
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn snr_or(&self, default: SnrGrid) -> SnrGrid {
        self.snr.unwrap_or(default)
    }

    pub fn mode_or(&self, default: RelayMode) -> RelayMode {
        self.mode.unwrap_or(default)
    }

    /// Checks the settings every command shares.
    pub fn validate(&self) -> CliResult<()> {
        if self.n_channels == 0 {
            return Err(CliError::Usage("channels: must be at least 1".into()));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(CliError::Usage(format!("gamma: must be positive, got {}", self.gamma)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(CliError::Usage(format!("epsilon: must lie in (0, 1), got {}", self.epsilon)));
        }
        if self.n_symbols == 0 {
            return Err(CliError::Usage("symbols: must be at least 1".into()));
        }
        Ok(())
    }
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.scenarios.iter().map(|s| s.name()).collect();
        writeln!(f, "scenario = {}", names.join(","))?;
        writeln!(f, "m = {}", self.m)?;
        if let Some(g) = self.snr {
            writeln!(f, "snr = {g}")?;
        }
        writeln!(f, "channels = {}", self.n_channels)?;
        writeln!(f, "noise = {}", self.n_noise)?;
        writeln!(f, "seed = {}", self.seed)?;
        if let Some(m) = self.mode {
            writeln!(f, "mode = {m}")?;
        }
        writeln!(f, "diversity = {}", self.diversity)?;
        writeln!(f, "gamma = {}", self.gamma)?;
        writeln!(f, "epsilon = {}", self.epsilon)?;
        writeln!(f, "symbols = {}", self.n_symbols)?;
        writeln!(f, "budget = {}", self.budget)?;
        if let Some(p) = &self.out {
            writeln!(f, "out = {}", p.display())?;
        }
        writeln!(f, "format = {}", self.format)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_points_are_inclusive() {
        let g: SnrGrid = "60:100:10".parse().unwrap();
        assert_eq!(g.points(), vec![60.0, 70.0, 80.0, 90.0, 100.0]);
        let h: SnrGrid = "0:1:0.1".parse().unwrap();
        assert_eq!(h.points().len(), 11);
    }

    #[test]
    fn bad_grids_rejected() {
        for s in ["60:100", "a:1:1", "10:0:1", "0:10:0", "0:10:-1"] {
            assert!(s.parse::<SnrGrid>().is_err(), "{s}");
        }
    }

    #[test]
    fn parse_reports_line_numbers() {
        let err = ExperimentConfig::parse("m = 4\nbogus = 1\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let err = ExperimentConfig::parse("m = four\n").unwrap_err();
        assert!(err.to_string().contains("m: invalid value"), "{err}");
    }

    #[test]
    fn display_round_trips() {
        let cfg = ExperimentConfig {
            scenarios: vec![Scenario::Tdma, Scenario::TwoAntennaRelay],
            snr: Some(SnrGrid::new(40.5, 90.0, 2.5)),
            mode: Some(RelayMode::ZfForward),
            gamma: 0.1 + 0.2,
            out: Some("results/run.csv".into()),
            format: Format::Json,
            ..ExperimentConfig::default()
        };
        assert_eq!(ExperimentConfig::parse(&cfg.to_string()).unwrap(), cfg);
    }
}
