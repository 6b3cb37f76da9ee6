//! Flat key=value run configuration with command-line overrides.

use std::fmt::Write as _;
use std::path::PathBuf;

use vibrastab::excitation::Excitation;
use vibrastab::galerkin::{SimulationOptions, DEFAULT_SEED};
use vibrastab::model::{ControlParams, StringParams};

use crate::CliError;

/// Where the excitation comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExcitationSpec {
    Harmonic,
    Square,
    /// Two-column `t,g(t)` CSV file.
    Csv(PathBuf),
}

impl ExcitationSpec {
    fn echo(&self) -> String {
        match self {
            Self::Harmonic => "harmonic".into(),
            Self::Square => "square".into(),
            Self::Csv(p) => p.display().to_string(),
        }
    }
}

/// Every tunable of the four subcommands. Unknown keys are rejected at parse
/// time; all value constraints are re-validated when the domain types are
/// built.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub a: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub delta: f64,
    pub k: f64,
    pub cutoff_n: Option<usize>,
    pub excitation: ExcitationSpec,
    pub samples_per_period: usize,
    pub n_sim: usize,
    pub periods: usize,
    pub steps_per_period: usize,
    pub epsilon: f64,
    pub seed: u64,
    pub burn_in: usize,
    pub tail_modes: usize,
    pub initial_amplitude: f64,
    pub delta_grid: Vec<f64>,
    pub k_grid: Vec<f64>,
    pub output_dir: PathBuf,
    pub svg: bool,
    /// Mode index for the `mode` subcommand.
    pub n: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            a: 1.0,
            gamma: 1.0,
            alpha: 0.1,
            delta: 0.1,
            k: 100.0,
            cutoff_n: None,
            excitation: ExcitationSpec::Harmonic,
            samples_per_period: 4096,
            n_sim: 8,
            periods: 100,
            steps_per_period: 4096,
            epsilon: 0.0,
            seed: DEFAULT_SEED,
            burn_in: 10,
            tail_modes: 32,
            initial_amplitude: 1.0,
            delta_grid: Vec::new(),
            k_grid: Vec::new(),
            output_dir: PathBuf::from("out"),
            svg: false,
            n: None,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::usage(format!("cannot parse {key}={value}")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, CliError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_num::<f64>(key, s))
        .collect()
}

impl RunConfig {
    /// Parse a config file body: one `key=value` per line, `#` comments.
    pub fn apply_file(&mut self, body: &str) -> Result<(), CliError> {
        for (lineno, raw) in body.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::usage(format!("config line {}: expected key=value", lineno + 1))
            })?;
            self.apply(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Set one key; used for both file entries and `--key value` overrides.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "a" => self.a = parse_num(key, value)?,
            "gamma" => self.gamma = parse_num(key, value)?,
            "alpha" => self.alpha = parse_num(key, value)?,
            "delta" => self.delta = parse_num(key, value)?,
            "k" => self.k = parse_num(key, value)?,
            "cutoff_n" => {
                self.cutoff_n = match value {
                    "none" | "" => None,
                    v => Some(parse_num(key, v)?),
                }
            }
            "excitation" => {
                self.excitation = match value {
                    "harmonic" => ExcitationSpec::Harmonic,
                    "square" => ExcitationSpec::Square,
                    path => ExcitationSpec::Csv(PathBuf::from(path)),
                }
            }
            "samples_per_period" => self.samples_per_period = parse_num(key, value)?,
            "n_sim" => self.n_sim = parse_num(key, value)?,
            "periods" => self.periods = parse_num(key, value)?,
            "steps_per_period" => self.steps_per_period = parse_num(key, value)?,
            "epsilon" => self.epsilon = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "burn_in" => self.burn_in = parse_num(key, value)?,
            "tail_modes" => self.tail_modes = parse_num(key, value)?,
            "initial_amplitude" => self.initial_amplitude = parse_num(key, value)?,
            "delta_grid" => self.delta_grid = parse_list(key, value)?,
            "k_grid" => self.k_grid = parse_list(key, value)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "svg" => {
                self.svg = match value {
                    "true" | "1" => true,
                    "false" | "0" => false,
                    _ => return Err(CliError::usage(format!("svg={value} is not a boolean"))),
                }
            }
            "n" => self.n = Some(parse_num(key, value)?),
            _ => return Err(CliError::usage(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    /// One-line echo of the full configuration, fixed key order.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "a={} gamma={} alpha={} delta={} k={} cutoff_n={} excitation={} \
             samples_per_period={} n_sim={} periods={} steps_per_period={} epsilon={} \
             seed={} burn_in={} tail_modes={} initial_amplitude={} delta_grid={} k_grid={} \
             output_dir={} svg={}",
            self.a,
            self.gamma,
            self.alpha,
            self.delta,
            self.k,
            self.cutoff_n
                .map_or_else(|| "none".to_string(), |n| n.to_string()),
            self.excitation.echo(),
            self.samples_per_period,
            self.n_sim,
            self.periods,
            self.steps_per_period,
            self.epsilon,
            self.seed,
            self.burn_in,
            self.tail_modes,
            self.initial_amplitude,
            join(&self.delta_grid),
            join(&self.k_grid),
            self.output_dir.display(),
            self.svg,
        );
        if let Some(n) = self.n {
            let _ = write!(s, " n={n}");
        }
        s
    }

    /// The excitation column value used in CSV rows.
    pub fn echo_excitation(&self) -> String {
        self.excitation.echo()
    }

    pub fn build_excitation(&self) -> Result<Excitation<f64>, CliError> {
        let e = match &self.excitation {
            ExcitationSpec::Harmonic => Excitation::harmonic(),
            ExcitationSpec::Square => Excitation::square_wave(),
            ExcitationSpec::Csv(path) => {
                let body = std::fs::read_to_string(path).map_err(|e| {
                    CliError::usage(format!("cannot read excitation file {}: {e}", path.display()))
                })?;
                Excitation::tabulated_from_csv(&body).map_err(CliError::config)?
            }
        };
        Ok(e.with_samples_per_period(self.samples_per_period))
    }

    pub fn build_params(&self) -> Result<StringParams<f64>, CliError> {
        StringParams::new(self.a, self.gamma, self.alpha).map_err(CliError::config)
    }

    pub fn build_control(&self) -> Result<ControlParams<f64>, CliError> {
        ControlParams::new(self.delta, self.k, self.build_excitation()?, self.cutoff_n)
            .map_err(CliError::config)
    }

    pub fn simulation_options(&self) -> SimulationOptions<f64> {
        SimulationOptions {
            n_sim: self.n_sim,
            periods: self.periods,
            steps_per_period: self.steps_per_period,
            tail_modes: self.tail_modes,
            seed: self.seed,
            epsilon: self.epsilon,
            burn_in: self.burn_in,
            initial_scale: self.initial_amplitude,
        }
    }
}

fn join(values: &[f64]) -> String {
    if values.is_empty() {
        return "none".into();
    }
    values
        .iter()
        .map(f64::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_overrides() {
        let mut c = RunConfig::default();
        c.apply_file("# comment\na = 2.0\ndelta_grid=0.1, 0.2,0.3\ncutoff_n=8\n")
            .unwrap();
        assert_eq!(c.a, 2.0);
        assert_eq!(c.delta_grid, vec![0.1, 0.2, 0.3]);
        assert_eq!(c.cutoff_n, Some(8));
        c.apply("a", "3.5").unwrap();
        assert_eq!(c.a, 3.5);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        let mut c = RunConfig::default();
        assert!(c.apply("bogus", "1").is_err());
        assert!(c.apply("a", "one").is_err());
        assert!(c.apply_file("noequals\n").is_err());
    }

    #[test]
    fn echo_is_stable() {
        let c = RunConfig::default();
        assert_eq!(c.echo(), c.echo());
        assert!(c.echo().contains("delta=0.1"));
        assert!(c.echo().contains("cutoff_n=none"));
    }
}
