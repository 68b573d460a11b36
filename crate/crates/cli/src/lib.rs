//! Command-line runner and HTTP service for the bundled scenarios.

use std::ffi::OsString;
use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub mod report;
pub mod runner;
pub mod service;

pub use report::SimulationReport;
pub use runner::{run_scenario, Format, RunError, RunOptions, RunOutput, Scenario};

#[derive(Debug, Parser)]
#[command(name = "agentloop", version, about = "Run agent scenarios")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario and print its log or JSON output.
    Run {
        #[arg(long, value_enum)]
        scenario: Scenario,
        #[arg(long)]
        ticks: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Facilitation of `true` announcements (opinion only).
        #[arg(long)]
        bias: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Write output here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Scenario configuration as a JSON file.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Serve the simulate endpoint.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
    },
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAULT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };

    match cli.command {
        Command::Run {
            scenario,
            ticks,
            seed,
            bias,
            format,
            out: path,
            config,
        } => {
            let config = match config.as_deref().map(runner::read_config).transpose() {
                Ok(c) => c,
                Err(e) => return report_error(err, &e),
            };
            let opts = RunOptions {
                ticks,
                seed,
                bias,
                config,
            };
            let output = match run_scenario(scenario, &opts) {
                Ok(o) => o,
                Err(e) => return report_error(err, &e),
            };
            let text = output.render(format);
            let written = match path {
                Some(path) => std::fs::write(&path, text),
                None => out.write_all(text.as_bytes()),
            };
            match written {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    EXIT_FAULT
                }
            }
        }
        Command::Serve { addr } => {
            let runtime = match tokio::runtime::Runtime::new() {
                Ok(rt) => rt,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    return EXIT_FAULT;
                }
            };
            match runtime.block_on(service::serve(addr)) {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    EXIT_FAULT
                }
            }
        }
    }
}

fn report_error(err: &mut dyn Write, e: &RunError) -> i32 {
    let _ = writeln!(err, "error: {e}");
    match e {
        RunError::Usage(_) => EXIT_USAGE,
        RunError::Fault(_) | RunError::Shape(_) => EXIT_FAULT,
    }
}
