use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use phbench::validation::ValidationHooks;
use phbench_cli::{cmd_metrics, cmd_run, cmd_validate, parse_window, CmdResult, Summary};

#[derive(Parser)]
#[command(
    name = "phbench",
    version,
    about = "Cartesian impedance control benchmark"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and write its CSV log.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// CSV destination; defaults to the config's output or `<name>.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// RMS window of the step power error, `t0:t1` seconds.
        #[arg(long, value_parser = parse_window)]
        window: Option<(f64, f64)>,
    },
    /// Recompute the metric columns of a logged run.
    Metrics {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_parser = parse_window)]
        window: Option<(f64, f64)>,
    },
    /// Run the dynamics, energy and power-balance self-checks.
    Validate {
        /// Corrupts the checked mass matrices by this amount (exercises the suite).
        #[arg(long, hide = true, default_value_t = 0.0)]
        inject_mass_asymmetry: f64,
    },
}

fn report(summary: CmdResult<Summary>, to_stderr: bool) -> CmdResult<()> {
    let s = summary?;
    if to_stderr {
        let _ = s.print(&mut std::io::stderr());
    } else {
        let _ = s.print(&mut std::io::stdout());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Run {
            config,
            out,
            window,
        } => report(cmd_run(&config, out.as_deref(), window), false),
        Command::Metrics {
            input,
            config,
            out,
            window,
        } => {
            // keep stdout clean when it carries the CSV
            let to_stderr = out.is_none();
            report(
                cmd_metrics(&input, &config, out.as_deref(), window),
                to_stderr,
            )
        }
        Command::Validate {
            inject_mass_asymmetry,
        } => cmd_validate(
            &ValidationHooks {
                mass_matrix_asymmetry: inject_mass_asymmetry,
            },
            &mut std::io::stdout(),
        ),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error());
            ExitCode::from(f.exit_code())
        }
    }
}
