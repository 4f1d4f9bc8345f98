//! Command implementations behind the `phbench` binary.

pub mod config;
pub mod csvio;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use phbench::metrics::{evaluate_run, rms_over_window, RunMetrics};
use phbench::sim::run_scenario;
use phbench::validation::{run_validation, ValidationHooks};

use config::{load_config, RunConfig};
use csvio::{read_run, write_run, Schema};

pub const DEFAULT_WINDOW: (f64, f64) = (0.0, 0.25);

/// Why a command did not succeed; maps onto the process exit code.
#[derive(Debug)]
pub enum Failure {
    /// A run or check completed and reported failure (exit code 1).
    Check(anyhow::Error),
    /// Bad arguments, unreadable inputs or malformed files (exit code 2).
    Usage(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Usage(_) => 2,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Check(e) | Failure::Usage(e) => e,
        }
    }
}

pub type CmdResult<T> = std::result::Result<T, Failure>;

fn usage<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Usage(e.into())
}

fn check<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Check(e.into())
}

/// Parses `t0:t1`.
pub fn parse_window(s: &str) -> anyhow::Result<(f64, f64)> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| anyhow!("window must look like t0:t1"))?;
    let (t0, t1): (f64, f64) = (a.trim().parse()?, b.trim().parse()?);
    if !(t1 > t0) {
        return Err(anyhow!("window end must exceed its start"));
    }
    Ok((t0, t1))
}

/// Headline numbers of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub samples: usize,
    pub window: (f64, f64),
    pub rms_step_power_error: Option<f64>,
    pub min_passivity_margin: Option<f64>,
    pub min_general_margin: Option<f64>,
    pub peak_h_omega: f64,
}

impl Summary {
    pub fn of(metrics: &RunMetrics<f64>, window: (f64, f64)) -> Self {
        let s = &metrics.samples;
        let t: Vec<f64> = s.iter().map(|m| m.t).collect();
        let rms = s
            .iter()
            .map(|m| m.e_step)
            .collect::<Option<Vec<f64>>>()
            .and_then(|e| rms_over_window(&t, &e, window.0, window.1).ok());
        let min_of = |v: Vec<Option<f64>>| {
            v.into_iter()
                .collect::<Option<Vec<f64>>>()
                .map(|v| v.into_iter().skip(1).fold(f64::INFINITY, f64::min))
        };
        Self {
            samples: s.len(),
            window,
            rms_step_power_error: rms,
            min_passivity_margin: min_of(s.iter().map(|m| m.passivity_margin).collect()),
            min_general_margin: min_of(s.iter().map(|m| m.general_passivity_margin).collect()),
            peak_h_omega: s.iter().map(|m| m.h_omega).fold(0.0, f64::max),
        }
    }

    pub fn print(&self, out: &mut dyn Write) -> std::io::Result<()> {
        let show = |v: Option<f64>, unit: &str| match v {
            Some(v) => format!("{v:.6} {unit}"),
            None => "n/a".to_string(),
        };
        writeln!(out, "samples: {}", self.samples)?;
        writeln!(
            out,
            "rms step power error over [{}, {}] s: {}",
            self.window.0,
            self.window.1,
            show(self.rms_step_power_error, "W")
        )?;
        writeln!(
            out,
            "min passivity margin (t > 0): {}",
            show(self.min_passivity_margin, "J")
        )?;
        writeln!(
            out,
            "min general passivity margin (t > 0): {}",
            show(self.min_general_margin, "J")
        )?;
        writeln!(out, "peak H_Omega: {:.6} J", self.peak_h_omega)
    }
}

fn open_output(path: Option<&Path>) -> CmdResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p)
                .with_context(|| format!("creating {}", p.display()))
                .map_err(usage)?,
        )),
        None => Box::new(BufWriter::new(std::io::stdout())),
    })
}

/// Simulates the configured scenario, writes its CSV log and returns the summary.
pub fn cmd_run(
    config_path: &Path,
    out: Option<&Path>,
    window: Option<(f64, f64)>,
) -> CmdResult<Summary> {
    let RunConfig {
        scenario,
        output,
        window: config_window,
    } = load_config(config_path).map_err(usage)?;
    let schema = Schema::for_scenario(&scenario).map_err(usage)?;
    let traj = run_scenario(&scenario)
        .with_context(|| format!("running `{}`", scenario.name))
        .map_err(check)?;
    let target: PathBuf = out
        .map(Path::to_path_buf)
        .or(output)
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", scenario.name)));
    let mut w = open_output(Some(&target))?;
    write_run(&mut w, &schema, &traj.log, &traj.metrics).map_err(usage)?;
    w.flush().map_err(usage)?;
    Ok(Summary::of(
        &traj.metrics,
        window.or(config_window).unwrap_or(DEFAULT_WINDOW),
    ))
}

/// Recomputes every metric column of a logged run; `out = None` writes to stdout.
pub fn cmd_metrics(
    log_path: &Path,
    config_path: &Path,
    out: Option<&Path>,
    window: Option<(f64, f64)>,
) -> CmdResult<Summary> {
    let RunConfig {
        scenario,
        window: config_window,
        ..
    } = load_config(config_path).map_err(usage)?;
    let schema = Schema::for_scenario(&scenario).map_err(usage)?;
    let file = File::open(log_path)
        .with_context(|| format!("opening {}", log_path.display()))
        .map_err(usage)?;
    let log = read_run(BufReader::new(file), &schema)
        .with_context(|| format!("reading {}", log_path.display()))
        .map_err(usage)?;
    let ctx = scenario.metrics_context().map_err(check)?;
    let metrics = evaluate_run(&ctx, &log).map_err(check)?;
    let mut w = open_output(out)?;
    write_run(&mut w, &schema, &log, &metrics).map_err(usage)?;
    w.flush().map_err(usage)?;
    Ok(Summary::of(
        &metrics,
        window.or(config_window).unwrap_or(DEFAULT_WINDOW),
    ))
}

/// Runs the self-check suite, printing one line per check.
pub fn cmd_validate(hooks: &ValidationHooks, out: &mut dyn Write) -> CmdResult<()> {
    let checks = run_validation(hooks);
    let width = checks
        .iter()
        .map(|c| c.name.chars().count())
        .max()
        .unwrap_or(0);
    for c in &checks {
        let pad = width - c.name.chars().count();
        writeln!(
            out,
            "{} {}{}  {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            " ".repeat(pad),
            c.detail
        )
        .map_err(usage)?;
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(check(anyhow!("{failed} of {} checks failed", checks.len())));
    }
    writeln!(out, "all {} checks passed", checks.len()).map_err(usage)?;
    Ok(())
}
