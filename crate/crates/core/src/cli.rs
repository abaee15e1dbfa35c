//! The `qsl` command line.
//!
//! Exit codes: 0 on success, 1 on any input error, 2 when `falsify` or
//! `xi-check` finds a violated inequality.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bounds::{bound_set, classify_regime, envelope_angle, xi, XI_SLOPE};
use crate::error::{Error, Result};
use crate::figures::{
    fig1_dataset, fig2_dataset, fig3_dataset, trace_dataset, Scenario, DEFAULT_GRID_RESOLUTION, DEFAULT_TRACE_STEPS,
};
use crate::json::{inf_f64, to_json_string};
use crate::spectral::{
    energy_moments, make_qubit, overlap, qutrit_from_moments, EnergyMoments, SpectralState, DEFAULT_P_GRID,
};
use crate::verify::{
    falsification_sweep, find_orthogonalization_time, xi_oracle, SweepConfig, DEFAULT_ORTHO_TOLERANCE,
    DEFAULT_SLACK_TOLERANCE, DEFAULT_WINDOW_FACTOR,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

/// Largest tolerated gap between the oracle and linearised `xi`.
pub const XI_DELTA_BOUND: f64 = 5e-4;
/// Slack on the lower side: delta(1) is exactly 0 but the root finder leaves ~1e-13.
pub const XI_ROUNDOFF: f64 = 1e-12;

#[derive(Parser, Debug)]
#[command(name = "qsl", version, about = "Quantum speed limits for states with a bounded energy spectrum")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct StateArgs {
    /// State JSON file: {"levels": [{"energy": .., "population": ..}, ..]}
    #[arg(long, conflicts_with_all = ["qubit_p1", "qutrit_mean"])]
    state: Option<PathBuf>,
    /// Qubit with excited-state population P1
    #[arg(long, conflicts_with = "qutrit_mean")]
    qubit_p1: Option<f64>,
    /// Qutrit mean energy
    #[arg(long, requires = "qutrit_sigma")]
    qutrit_mean: Option<f64>,
    /// Qutrit energy spread
    #[arg(long, requires = "qutrit_mean")]
    qutrit_sigma: Option<f64>,
    /// Relative position of the qutrit's middle level
    #[arg(long, default_value_t = 0.5)]
    eta: f64,
    /// Top level energy for built-in constructors
    #[arg(long, default_value_t = 1.0)]
    emax: f64,
}

impl StateArgs {
    fn load(&self) -> Result<SpectralState> {
        if let Some(path) = &self.state {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Usage(format!("cannot read state file {}: {e}", path.display())))?;
            return SpectralState::from_json(&text);
        }
        if let Some(p1) = self.qubit_p1 {
            return make_qubit(p1, self.emax);
        }
        if let (Some(mean), Some(sigma)) = (self.qutrit_mean, self.qutrit_sigma) {
            return qutrit_from_moments(mean, sigma, self.eta, self.emax);
        }
        Err(Error::Usage("no state given: use --state, --qubit-p1 or --qutrit-mean/--qutrit-sigma".into()))
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct Output {
    /// Write to this file instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Energy moments of a state
    Moments {
        #[command(flatten)]
        state: StateArgs,
        /// Comma-separated p values for the Lp norms
        #[arg(long, value_delimiter = ',')]
        p: Option<Vec<f64>>,
        /// Include Lp norms on the default p grid
        #[arg(long)]
        lp: bool,
        #[command(flatten)]
        output: Output,
    },
    /// All orthogonalization-time bounds
    Bounds {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, value_delimiter = ',')]
        p: Option<Vec<f64>>,
        #[arg(long)]
        lp: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Dynamical regime of a state or of a (mean, sigma) pair
    Regime {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, requires = "sigma", conflicts_with_all = ["state", "qubit_p1", "qutrit_mean"])]
        mean: Option<f64>,
        #[arg(long, requires = "mean")]
        sigma: Option<f64>,
        /// Lowest occupied energy when using --mean/--sigma
        #[arg(long, default_value_t = 0.0)]
        e0: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Overlap trace with bound curves, or one sample with --at
    Evolve {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_TRACE_STEPS)]
        steps: usize,
        /// Evaluate a single time (replay of a reported violation)
        #[arg(long)]
        at: Option<f64>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[command(flatten)]
        output: Output,
    },
    /// First orthogonalization time
    Ortho {
        #[command(flatten)]
        state: StateArgs,
        /// Search window; defaults to 20 bandwidth times
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_ORTHO_TOLERANCE)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Regime diagram over (E, sigma) in units of Emax
    Fig1 {
        #[arg(long, default_value_t = DEFAULT_GRID_RESOLUTION)]
        resolution: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[command(flatten)]
        output: Output,
    },
    /// Qubit evolution scenarios a, b, c
    Fig2 {
        #[arg(long)]
        scenario: String,
        #[arg(long, default_value_t = DEFAULT_TRACE_STEPS)]
        steps: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[command(flatten)]
        output: Output,
    },
    /// Qutrit evolution scenarios a, b, c
    Fig3 {
        #[arg(long)]
        scenario: String,
        #[arg(long, default_value_t = DEFAULT_TRACE_STEPS)]
        steps: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[command(flatten)]
        output: Output,
    },
    /// Random falsification sweep of every inequality
    Falsify {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Level count range MIN:MAX (or a single count)
        #[arg(long, default_value = "2:8")]
        levels: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        emax: f64,
        #[arg(long, default_value_t = 1000)]
        time_samples: usize,
        #[arg(long, default_value_t = DEFAULT_SLACK_TOLERANCE)]
        tolerance: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Compare the linearised xi with the tangency-construction oracle
    XiCheck {
        /// Number of points x = 1/n, 2/n, .., 1
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Serialize)]
struct SampleReport {
    t: f64,
    overlap: [f64; 2],
    magnitude: f64,
    angle: f64,
    envelope_angle: f64,
    slack: f64,
}

#[derive(Serialize)]
struct OrthoReport {
    t_perp: Option<f64>,
    #[serde(with = "inf_f64")]
    tau_qsl: f64,
    #[serde(with = "inf_f64")]
    tau_bw: f64,
    t_max: f64,
}

#[derive(Serialize)]
struct XiRow {
    x: f64,
    xi: f64,
    xi_oracle: f64,
    delta: f64,
}

#[derive(Serialize)]
struct XiReport {
    slope: f64,
    delta_bound: f64,
    rows: Vec<XiRow>,
    passed: bool,
}

fn parse_levels(spec: &str) -> Result<(usize, usize)> {
    let bad = || Error::Usage(format!("--levels: expected MIN:MAX or N, got {spec:?}"));
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let (lo, hi) = match spec.split_once(':') {
        Some((a, b)) => (parse(a)?, parse(b)?),
        None => {
            let n = parse(spec)?;
            (n, n)
        }
    };
    if lo == 0 || hi < lo {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn p_grid(p: &Option<Vec<f64>>, lp: bool) -> Option<Vec<f64>> {
    match (p, lp) {
        (Some(list), _) => Some(list.clone()),
        (None, true) => Some(DEFAULT_P_GRID.to_vec()),
        (None, false) => None,
    }
}

fn emit<W: Write>(output: &Output, text: &str, stdout: &mut W) -> Result<()> {
    match &output.out {
        Some(path) => fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn execute<W: Write>(command: Command, stdout: &mut W) -> Result<i32> {
    match command {
        Command::Moments { state, p, lp, output } => {
            let s = state.load()?;
            let moments = energy_moments(&s, p_grid(&p, lp).as_deref())?;
            emit(&output, &to_json_string(&moments)?, stdout)?;
        }
        Command::Bounds { state, p, lp, output } => {
            let s = state.load()?;
            let moments = energy_moments(&s, p_grid(&p, lp).as_deref())?;
            emit(&output, &to_json_string(&bound_set(&moments))?, stdout)?;
        }
        Command::Regime { state, mean, sigma, e0, output } => {
            let moments = match (mean, sigma) {
                (Some(mean), Some(sigma)) => EnergyMoments::from_summary(e0, state.emax, mean, sigma)?,
                _ => energy_moments(&state.load()?, None)?,
            };
            emit(&output, &to_json_string(&classify_regime(&moments))?, stdout)?;
        }
        Command::Evolve { state, t_max, steps, at, format, output } => {
            let s = state.load()?;
            if let Some(t) = at {
                let bounds = bound_set(&energy_moments(&s, None)?);
                let sample = overlap(&s, t);
                let envelope = envelope_angle(t, &bounds);
                let report = SampleReport {
                    t,
                    overlap: [sample.value.re, sample.value.im],
                    magnitude: sample.magnitude,
                    angle: sample.angle,
                    envelope_angle: envelope,
                    slack: envelope - sample.angle,
                };
                emit(&output, &to_json_string(&report)?, stdout)?;
            } else {
                let data = trace_dataset("custom", &s, t_max, steps)?;
                let text = match format {
                    Format::Json => to_json_string(&data)?,
                    Format::Csv => data.to_csv(),
                };
                emit(&output, &text, stdout)?;
            }
        }
        Command::Ortho { state, t_max, tol, output } => {
            let s = state.load()?;
            let bounds = bound_set(&energy_moments(&s, None)?);
            let t_max = t_max.unwrap_or(if bounds.tau_bw.is_finite() {
                DEFAULT_WINDOW_FACTOR * bounds.tau_bw
            } else {
                1.0
            });
            if tol.is_nan() || tol <= 0.0 {
                return Err(Error::OutOfRange { name: "tol", value: tol, range: "(0, inf)" });
            }
            let report = OrthoReport {
                t_perp: find_orthogonalization_time(&s, t_max, tol),
                tau_qsl: bounds.tau_qsl,
                tau_bw: bounds.tau_bw,
                t_max,
            };
            emit(&output, &to_json_string(&report)?, stdout)?;
        }
        Command::Fig1 { resolution, format, output } => {
            let grid = fig1_dataset(resolution)?;
            let text = match format {
                Format::Json => to_json_string(&grid)?,
                Format::Csv => grid.to_csv(),
            };
            emit(&output, &text, stdout)?;
        }
        Command::Fig2 { scenario, steps, format, output } => {
            figure(false, &scenario, steps, format, &output, stdout)?;
        }
        Command::Fig3 { scenario, steps, format, output } => {
            figure(true, &scenario, steps, format, &output, stdout)?;
        }
        Command::Falsify { samples, levels, seed, emax, time_samples, tolerance, output } => {
            let (min_levels, max_levels) = parse_levels(&levels)?;
            let config = SweepConfig {
                samples,
                min_levels,
                max_levels,
                seed,
                emax,
                time_samples,
                tolerance,
                ..SweepConfig::default()
            };
            let report = falsification_sweep(&config)?;
            emit(&output, &to_json_string(&report)?, stdout)?;
            if !report.violations.is_empty() {
                return Ok(EXIT_VIOLATION);
            }
        }
        Command::XiCheck { points, output } => {
            if points == 0 {
                return Err(Error::OutOfRange { name: "points", value: 0.0, range: "[1, inf)" });
            }
            let mut rows = Vec::with_capacity(points);
            for k in 1..=points {
                let x = k as f64 / points as f64;
                let linear = xi(x)?;
                let oracle = xi_oracle(x)?;
                rows.push(XiRow { x, xi: linear, xi_oracle: oracle, delta: oracle - linear });
            }
            let passed = rows.iter().all(|r| r.delta >= -XI_ROUNDOFF && r.delta < XI_DELTA_BOUND);
            let report = XiReport { slope: XI_SLOPE, delta_bound: XI_DELTA_BOUND, rows, passed };
            emit(&output, &to_json_string(&report)?, stdout)?;
            if !passed {
                return Ok(EXIT_VIOLATION);
            }
        }
    }
    Ok(EXIT_OK)
}

fn figure<W: Write>(qutrit: bool, scenario: &str, steps: usize, format: Format, output: &Output, stdout: &mut W) -> Result<()> {
    let scenario: Scenario = scenario.parse()?;
    let data = if qutrit { fig3_dataset(scenario, steps)? } else { fig2_dataset(scenario, steps)? };
    let text = match format {
        Format::Json => to_json_string(&data)?,
        Format::Csv => data.to_csv(),
    };
    emit(output, &text, stdout)
}

/// Runs the CLI with explicit streams. Returns the process exit code.
pub fn run<I, T, W, E>(argv: I, stdout: &mut W, stderr: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", err.render());
                    EXIT_OK
                }
                _ => {
                    let rendered = err.render().to_string();
                    let line = rendered.lines().next().unwrap_or("invalid arguments");
                    let _ = writeln!(stderr, "{line}");
                    EXIT_INPUT
                }
            };
        }
    };

    match execute(cli.command, stdout) {
        Ok(code) => code,
        Err(err) => {
            let _ = writeln!(stderr, "error: {err}");
            EXIT_INPUT
        }
    }
}

/// Runs the CLI against the process's standard streams.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(argv, &mut stdout.lock(), &mut stderr.lock())
}
