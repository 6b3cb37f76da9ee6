//! Batch front end for the vibrating-string stabilization toolkit.
//!
//! ```text
//! vibrastab <verify|mode|sweep|simulate> [--config FILE] [--key value ...]
//! ```
//!
//! Configuration is a flat `key=value` file; any key can be overridden on
//! the command line. Exit codes: 0 success, 1 a checked assumption or
//! verdict failed, 2 usage or configuration error.

use std::process::ExitCode;

mod commands;
mod config;
mod output;

use config::RunConfig;

/// Error carrying its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub code: u8,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: 2,
        }
    }

    pub fn run(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: 1,
        }
    }

    /// Map core errors: parameter-class problems are configuration errors,
    /// numerical failures are runtime failures.
    pub fn config(err: vibrastab::Error) -> Self {
        use vibrastab::Error::*;
        let code = match err {
            InvalidParameter(_) | Aliasing(_) | GridMismatch(_) | InvalidExcitation(_) => 2,
            IntegrationFailure(_) | SingularMatrix(_) | NotApplicable(_) => 1,
        };
        Self {
            message: err.to_string(),
            code,
        }
    }
}

const USAGE: &str = "\
usage: vibrastab <command> [--config FILE] [--key value ...]

commands:
  verify     check the zero-mean assumptions of the excitation
  mode       report averaged spectrum, thresholds and monodromy verdict
             for one mode (requires --n <index>)
  sweep      stability sweep over delta_grid x k_grid, CSV (+ optional SVG)
  simulate   time-domain run with per-period norms and a decay summary

config keys (defaults in parentheses):
  a(1) gamma(1) alpha(0.1) delta(0.1) k(100) cutoff_n(none)
  excitation(harmonic|square|<csv path>) samples_per_period(4096)
  n_sim(8) periods(100) steps_per_period(4096) epsilon(0) seed(5)
  burn_in(10) tail_modes(32) initial_amplitude(1) delta_grid() k_grid()
  output_dir(out) svg(false) n()

environment:
  VIBRASTAB_THREADS   caps the sweep worker count";

fn parse_args(args: &[String]) -> Result<(String, RunConfig), CliError> {
    if args.is_empty() || args[0] == "--help" || args[0] == "-h" || args[0] == "help" {
        println!("{USAGE}");
        std::process::exit(if args.is_empty() { 2 } else { 0 });
    }
    let command = args[0].clone();
    if !matches!(command.as_str(), "verify" | "mode" | "sweep" | "simulate") {
        return Err(CliError::usage(format!(
            "unknown command '{command}'\n{USAGE}"
        )));
    }

    let mut config = RunConfig::default();
    // first pass: the config file, so explicit flags always win
    let mut i = 1;
    while i < args.len() {
        if args[i] == "--config" {
            let path = args
                .get(i + 1)
                .ok_or_else(|| CliError::usage("--config needs a path"))?;
            let body = std::fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("cannot read config {path}: {e}")))?;
            config.apply_file(&body)?;
            i += 2;
        } else {
            i += 2;
        }
    }
    // second pass: per-key overrides
    let mut i = 1;
    while i < args.len() {
        let flag = &args[i];
        let key = flag
            .strip_prefix("--")
            .ok_or_else(|| CliError::usage(format!("expected --key, got '{flag}'")))?;
        let value = args
            .get(i + 1)
            .ok_or_else(|| CliError::usage(format!("--{key} needs a value")))?;
        if key != "config" {
            config.apply(key, value)?;
        }
        i += 2;
    }
    Ok((command, config))
}

fn run() -> Result<u8, CliError> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (command, config) = parse_args(&args)?;
    match command.as_str() {
        "verify" => commands::cmd_verify(&config),
        "mode" => commands::cmd_mode(&config),
        "sweep" => commands::cmd_sweep(&config),
        "simulate" => commands::cmd_simulate(&config),
        _ => unreachable!("validated above"),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
