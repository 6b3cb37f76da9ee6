//! The four subcommands: `verify`, `mode`, `sweep`, `simulate`.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use vibrastab::galerkin::{end_to_end_verdict, EndToEndReport};
use vibrastab::model::ModeIndex;
use vibrastab::stability::{ModeSystem, StabilityClass};

use crate::config::RunConfig;
use crate::output::{sweep_svg, verdict_letter};
use crate::CliError;

fn ensure_output_dir(config: &RunConfig) -> Result<(), CliError> {
    fs::create_dir_all(&config.output_dir)
        .map_err(|e| CliError::run(format!("cannot create output dir: {e}")))
}

fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    fs::write(path, body).map_err(|e| CliError::run(format!("cannot write {}: {e}", path.display())))
}

fn fmt_complex(z: &vibrastab::num_complex::Complex<f64>) -> String {
    format!("{}{:+}i", z.re, z.im)
}

/// Check the zero-mean assumptions of the configured excitation and write
/// the measured report. Exit code 0 when both assumptions pass, 1 otherwise.
pub fn cmd_verify(config: &RunConfig) -> Result<u8, CliError> {
    ensure_output_dir(config)?;
    let excitation = config.build_excitation()?;
    let report = excitation.verify_assumptions();

    let mut body = String::new();
    let _ = writeln!(body, "# vibrastab verify");
    let _ = writeln!(body, "# config: {}", config.echo());
    let _ = writeln!(body, "kind={}", excitation.kind_name());
    let _ = writeln!(body, "integral_g={}", report.integral_g);
    let _ = writeln!(body, "integral_G={}", report.integral_primitive);
    let _ = writeln!(body, "gamma_quadrature={}", report.gamma_quadrature);
    let _ = writeln!(body, "max_abs_g={}", report.max_abs_g);
    let _ = writeln!(body, "max_abs_G={}", report.max_abs_primitive);
    let _ = writeln!(body, "tolerance={}", report.tolerance);
    let _ = writeln!(
        body,
        "assumption_zero_mean={}",
        if report.zero_mean_ok { "PASS" } else { "FAIL" }
    );
    let _ = writeln!(
        body,
        "assumption_zero_mean_primitive={}",
        if report.zero_mean_primitive_ok { "PASS" } else { "FAIL" }
    );
    let _ = writeln!(body, "discontinuous={}", report.discontinuous);
    write_file(&config.output_dir.join("assumptions.txt"), &body)?;
    print!("{body}");

    if report.all_pass() {
        if report.discontinuous {
            println!("warning: waveform has jump discontinuities (its primitive is continuous)");
        }
        Ok(0)
    } else {
        if !report.zero_mean_ok {
            println!("Assumption 1 failed, mean={}", report.integral_g);
        }
        if !report.zero_mean_primitive_ok {
            println!("Assumption 2 failed, primitive mean={}", report.integral_primitive);
        }
        Ok(1)
    }
}

/// Per-mode report: averaged generator, its eigenvalues, threshold margins,
/// monodromy spectrum and verdict; appends one row to `modes.csv`.
pub fn cmd_mode(config: &RunConfig) -> Result<u8, CliError> {
    let n = config
        .n
        .ok_or_else(|| CliError::usage("mode requires --n <index>"))?;
    ensure_output_dir(config)?;
    let params = config.build_params()?;
    let control = config.build_control()?;
    let ms = ModeSystem::new(
        ModeIndex::new(n).map_err(CliError::config)?,
        params,
        control,
    );
    let lambda1 = ms.lambda1_closed_form().map_err(CliError::config)?;
    let averaged = vibrastab::stability::averaged_eigenvalues(&lambda1);
    let threshold = ms.threshold_test(config.epsilon).map_err(CliError::config)?;
    let verdict = ms.classify(config.steps_per_period).map_err(CliError::config)?;

    println!("mode n={n} (mu={})", n as f64 / 2.0);
    println!(
        "lambda1 = [[{}, {}], [{}, {}]]",
        lambda1[(0, 0)],
        lambda1[(0, 1)],
        lambda1[(1, 0)],
        lambda1[(1, 1)]
    );
    println!(
        "averaged eigenvalues: {} , {}",
        fmt_complex(&averaged[0]),
        fmt_complex(&averaged[1])
    );
    println!(
        "threshold margin = {} ({}, {:?})",
        threshold.margin,
        threshold.side.as_str(),
        threshold.regime
    );
    println!(
        "monodromy eigenvalues: {} , {} (spectral radius {})",
        fmt_complex(&verdict.monodromy_eigs[0]),
        fmt_complex(&verdict.monodromy_eigs[1]),
        verdict.spectral_radius
    );
    println!("liouville defect = {:e}", verdict.liouville_defect);
    println!("verdict: {}", verdict.class.as_str());

    let csv_path = config.output_dir.join("modes.csv");
    let need_header = !csv_path.exists();
    let mut file = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(&csv_path)
        .map_err(|e| CliError::run(format!("cannot open {}: {e}", csv_path.display())))?;
    if need_header {
        let _ = writeln!(
            file,
            "n,a,gamma,alpha,delta,k,cutoff_n,excitation,margin,side,\
             xi1_re,xi1_im,xi2_re,xi2_im,rho,mono1_re,mono1_im,mono2_re,mono2_im,verdict"
        );
    }
    let _ = writeln!(
        file,
        "{n},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        config.a,
        config.gamma,
        config.alpha,
        config.delta,
        config.k,
        config
            .cutoff_n
            .map_or_else(|| "none".to_string(), |c| c.to_string()),
        config.echo_excitation(),
        threshold.margin,
        threshold.side.as_str(),
        averaged[0].re,
        averaged[0].im,
        averaged[1].re,
        averaged[1].im,
        verdict.spectral_radius,
        verdict.monodromy_eigs[0].re,
        verdict.monodromy_eigs[0].im,
        verdict.monodromy_eigs[1].re,
        verdict.monodromy_eigs[1].im,
        verdict.class.as_str(),
    );
    Ok(0)
}

/// One computed sweep cell.
pub struct SweepRow {
    pub delta_index: usize,
    pub k_index: usize,
    pub delta: f64,
    pub k: f64,
    pub margin: f64,
    pub verdict: Option<StabilityClass>,
    pub sigma: Option<f64>,
    pub r_squared: Option<f64>,
    pub mode_verdicts: String,
    pub error: Option<String>,
}

fn worker_count(rows: usize) -> usize {
    let cap = std::env::var("VIBRASTAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&c| c >= 1);
    let avail = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    cap.unwrap_or(avail).min(rows.max(1))
}

fn sweep_cell(config: &RunConfig, di: usize, ki: usize) -> SweepRow {
    let delta = config.delta_grid[di];
    let k = config.k_grid[ki];
    let mut cell_cfg = config.clone();
    cell_cfg.delta = delta;
    cell_cfg.k = k;
    let mut opts = cell_cfg.simulation_options();
    opts.tail_modes = 0;

    let run = || -> Result<EndToEndReport<f64>, CliError> {
        let params = cell_cfg.build_params()?;
        let control = cell_cfg.build_control()?;
        end_to_end_verdict(&params, &control, &opts).map_err(CliError::config)
    };
    match run() {
        Ok(report) => SweepRow {
            delta_index: di,
            k_index: ki,
            delta,
            k,
            margin: report.thresholds[0].margin,
            verdict: Some(report.verdict),
            sigma: Some(report.fit.sigma),
            r_squared: Some(report.fit.r_squared),
            mode_verdicts: report
                .mode_verdicts
                .iter()
                .map(|v| verdict_letter(v.class))
                .collect(),
            error: None,
        },
        Err(e) => SweepRow {
            delta_index: di,
            k_index: ki,
            delta,
            k,
            margin: f64::NAN,
            verdict: None,
            sigma: None,
            r_squared: None,
            mode_verdicts: String::new(),
            error: Some(e.message.replace(',', ";")),
        },
    }
}

/// Stability sweep over the configured `(δ, k)` grids: one CSV row per cell,
/// optional SVG heatmap. Per-cell failures are recorded in the row and the
/// run continues.
pub fn cmd_sweep(config: &RunConfig) -> Result<u8, CliError> {
    if config.delta_grid.is_empty() || config.k_grid.is_empty() {
        return Err(CliError::usage(
            "sweep requires non-empty delta_grid and k_grid",
        ));
    }
    ensure_output_dir(config)?;

    let cells: Vec<(usize, usize)> = (0..config.delta_grid.len())
        .flat_map(|di| (0..config.k_grid.len()).map(move |ki| (di, ki)))
        .collect();
    let workers = worker_count(cells.len());
    let chunk_len = cells.len().div_ceil(workers);
    let mut rows: Vec<SweepRow> = Vec::with_capacity(cells.len());
    std::thread::scope(|scope| {
        let handles: Vec<_> = cells
            .chunks(chunk_len)
            .map(|chunk| {
                scope.spawn(move || {
                    chunk
                        .iter()
                        .map(|&(di, ki)| sweep_cell(config, di, ki))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            rows.extend(h.join().expect("sweep worker panicked"));
        }
    });
    // rows arrive chunked in grid order already; keep the invariant explicit
    rows.sort_by_key(|r| (r.delta_index, r.k_index));

    let mut body = String::new();
    let _ = writeln!(body, "# vibrastab sweep");
    let _ = writeln!(body, "# config: {}", config.echo());
    let _ = writeln!(body, "delta,k,margin,verdict,sigma,r_squared,mode_verdicts,error");
    for r in &rows {
        let _ = writeln!(
            body,
            "{},{},{},{},{},{},{},{}",
            r.delta,
            r.k,
            r.margin,
            r.verdict.map_or("error".into(), |v| v.as_str().to_string()),
            r.sigma.map_or(String::new(), |v| v.to_string()),
            r.r_squared.map_or(String::new(), |v| v.to_string()),
            r.mode_verdicts,
            r.error.clone().unwrap_or_default(),
        );
    }
    let csv_path = config.output_dir.join("sweep.csv");
    write_file(&csv_path, &body)?;
    println!("wrote {} ({} rows)", csv_path.display(), rows.len());

    if config.svg {
        let gamma_moment = config
            .build_excitation()?
            .gamma_moment()
            .map_err(CliError::config)?;
        let svg = sweep_svg(
            &rows,
            &config.delta_grid,
            &config.k_grid,
            config.a,
            config.gamma,
            gamma_moment,
        );
        let svg_path = config.output_dir.join("sweep.svg");
        write_file(&svg_path, &svg)?;
        println!("wrote {}", svg_path.display());
    }
    Ok(0)
}

/// Time-domain simulation with per-period norms and Lyapunov values plus a
/// fitted decay summary. A diverging run is recorded with a blow-up marker
/// and still exits 0: divergence is a valid scientific result here.
pub fn cmd_simulate(config: &RunConfig) -> Result<u8, CliError> {
    ensure_output_dir(config)?;
    let params = config.build_params()?;
    let control = config.build_control()?;
    let opts = config.simulation_options();
    let report = end_to_end_verdict(&params, &control, &opts).map_err(CliError::config)?;

    let traj = &report.trajectory;
    let mut body = String::new();
    let _ = writeln!(body, "# vibrastab simulate");
    let _ = writeln!(body, "# config: {}", config.echo());
    let _ = writeln!(body, "period,h1_sq,vel_sq,total,lyapunov");
    for i in 0..traj.times.len() {
        let _ = writeln!(
            body,
            "{},{},{},{},{}",
            traj.times[i],
            traj.h1_sq[i],
            traj.vel_sq[i],
            traj.summed_norm(i),
            traj.lyapunov[i]
        );
    }
    if traj.blow_up {
        let _ = writeln!(body, "# blow_up=true");
    }
    let mut summary = format!(
        "# summary verdict={} sigma={} c={} r_squared={} norm_growth_ratio={}",
        report.verdict.as_str(),
        report.fit.sigma,
        report.fit.c,
        report.fit.r_squared,
        report.norm_growth_ratio
    );
    if let Some(cert) = &report.certificate {
        let _ = write!(
            summary,
            " certificate_valid={} certificate_smallest_n={}",
            cert.valid, cert.smallest_valid_n
        );
    }
    if let Some(tail) = &report.tail {
        let _ = write!(
            summary,
            " tail_modes={}..{} tail_monotone={} tail_max_drift={:e}",
            tail.first_mode, tail.last_mode, tail.monotone, tail.max_relative_drift
        );
        if let Some(ok) = tail.positive_ok {
            let _ = write!(summary, " tail_positive_ok={ok}");
        }
    }
    let _ = writeln!(body, "{summary}");
    let csv_path = config.output_dir.join("trajectory.csv");
    write_file(&csv_path, &body)?;
    println!("wrote {}", csv_path.display());
    println!("{}", summary.trim_start_matches("# "));
    Ok(0)
}
