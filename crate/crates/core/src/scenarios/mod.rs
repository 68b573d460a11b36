//! The four bundled demonstration scenarios.

pub mod gridworld;
pub mod life;
pub mod opinion;
pub mod room;

pub use gridworld::{build_grid_world, GridWorldConfig};
pub use life::{build_game_of_life, conway_oracle, GolConfig};
pub use opinion::{build_opinion_spread, opinion_stats, OpinionConfig, OpinionTick, ShapeError};
pub use room::build_room;

/// Scenario names accepted by the runner, sorted.
pub const SCENARIOS: [&str; 4] = ["gol", "gridworld", "opinion", "room"];
