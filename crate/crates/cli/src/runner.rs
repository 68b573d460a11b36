//! Runs a named scenario and renders its output.

use std::fmt;
use std::path::Path;

use agentloop::scenarios::{
    build_game_of_life, build_grid_world, build_opinion_spread, build_room, opinion_stats, GolConfig, GridWorldConfig,
    OpinionConfig, ShapeError, SCENARIOS,
};
use agentloop::{EnvironmentError, Number, Trace};
use clap::ValueEnum;
use serde::de::DeserializeOwned;
use thiserror::Error;

use crate::report::SimulationReport;

/// Ticks the room tutorial runs when not told otherwise.
pub const ROOM_TICKS: u64 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Scenario {
    Room,
    Opinion,
    Gol,
    Gridworld,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Room => "room",
            Scenario::Opinion => "opinion",
            Scenario::Gol => "gol",
            Scenario::Gridworld => "gridworld",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn scenario_names() -> Vec<&'static str> {
    SCENARIOS.to_vec()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

/// Overrides applied on top of a scenario's configuration.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub ticks: Option<u64>,
    pub seed: Option<u64>,
    pub bias: Option<f64>,
    /// Scenario configuration as JSON text.
    pub config: Option<String>,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Fault(#[from] EnvironmentError),
    #[error("unexpected trace shape: {0}")]
    Shape(#[from] ShapeError),
}

/// The finished run, ready to be written in either format.
#[derive(Debug)]
pub enum RunOutput {
    Trace(Trace),
    Opinion { report: SimulationReport, trace: Trace },
}

impl RunOutput {
    pub fn trace(&self) -> &Trace {
        match self {
            RunOutput::Trace(t) | RunOutput::Opinion { trace: t, .. } => t,
        }
    }

    /// Canonical JSON: the trace, or the per-tick report for opinion runs.
    pub fn to_json(&self) -> String {
        match self {
            RunOutput::Trace(t) => t.to_json(),
            RunOutput::Opinion { report, .. } => report.to_json(),
        }
    }

    /// Every log event, one per line, in tick and agent order.
    pub fn log_lines(&self) -> Vec<String> {
        self.trace()
            .ticks
            .iter()
            .flat_map(|t| t.log_events().map(str::to_owned))
            .collect()
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json() + "\n",
            Format::Text => self.log_lines().iter().map(|l| format!("{l}\n")).collect(),
        }
    }
}

fn parse_config<T: DeserializeOwned + Default>(text: Option<&str>) -> Result<T, RunError> {
    match text {
        None => Ok(T::default()),
        Some(text) => serde_json::from_str(text).map_err(|e| RunError::Usage(format!("invalid scenario config: {e}"))),
    }
}

pub fn read_config(path: &Path) -> Result<String, RunError> {
    std::fs::read_to_string(path).map_err(|e| RunError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn usage(e: impl fmt::Display) -> RunError {
    RunError::Usage(e.to_string())
}

pub fn run_opinion(cfg: &OpinionConfig) -> Result<(SimulationReport, Trace), RunError> {
    let bias = Number::new(cfg.bias).ok_or_else(|| usage("bias must be finite"))?;
    let mut env = build_opinion_spread(cfg).map_err(usage)?;
    let trace = env.run(cfg.ticks)?;
    let per_tick = opinion_stats(&trace)?;
    let report = SimulationReport {
        bias,
        per_tick,
        seed: cfg.seed,
        ticks: cfg.ticks,
    };
    Ok((report, trace))
}

pub fn run_scenario(scenario: Scenario, opts: &RunOptions) -> Result<RunOutput, RunError> {
    if opts.bias.is_some() && scenario != Scenario::Opinion {
        return Err(usage("--bias only applies to the opinion scenario"));
    }
    let config = opts.config.as_deref();
    match scenario {
        Scenario::Room => {
            if config.is_some() {
                return Err(usage("the room scenario takes no configuration"));
            }
            let mut env = build_room();
            Ok(RunOutput::Trace(env.run(opts.ticks.unwrap_or(ROOM_TICKS))?))
        }
        Scenario::Opinion => {
            let mut cfg: OpinionConfig = parse_config(config)?;
            cfg.ticks = opts.ticks.unwrap_or(cfg.ticks);
            cfg.seed = opts.seed.unwrap_or(cfg.seed);
            cfg.bias = opts.bias.unwrap_or(cfg.bias);
            let (report, trace) = run_opinion(&cfg)?;
            Ok(RunOutput::Opinion { report, trace })
        }
        Scenario::Gol => {
            let mut cfg: GolConfig = parse_config(config)?;
            cfg.ticks = opts.ticks.unwrap_or(cfg.ticks);
            cfg.seed = opts.seed.unwrap_or(cfg.seed);
            let mut env = build_game_of_life(&cfg).map_err(usage)?;
            Ok(RunOutput::Trace(env.run(cfg.ticks)?))
        }
        Scenario::Gridworld => {
            let mut cfg: GridWorldConfig = parse_config(config)?;
            cfg.ticks = opts.ticks.unwrap_or(cfg.ticks);
            cfg.seed = opts.seed.unwrap_or(cfg.seed);
            let mut env = build_grid_world(&cfg).map_err(usage)?;
            Ok(RunOutput::Trace(env.run(cfg.ticks)?))
        }
    }
}
