//! Conway's Game of Life with one agent per cell.
//!
//! A cell agent only perceives its own state and its live-neighbour count.
//! It registers a status change with the environment, which buffers every
//! registration and applies them together once the last cell has acted, so
//! the board advances synchronously. Borders are dead.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::agent::{ActionRecord, Agent, BeliefMap, Fault, Plan};
use crate::environment::{Environment, StateUpdate};
use crate::error::ValidationError;
use crate::rng::SeededRng;
use crate::value::{Value, ValueRecord};

pub type Grid = Vec<Vec<bool>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct GolConfig {
    pub width: usize,
    pub height: usize,
    /// Explicit live cells as `[x, y]`; takes precedence over `density`.
    pub alive_cells: Option<Vec<[usize; 2]>>,
    pub density: Option<f64>,
    pub seed: u64,
    pub ticks: u64,
}

impl Default for GolConfig {
    fn default() -> Self {
        GolConfig {
            width: 20,
            height: 20,
            alive_cells: None,
            density: Some(0.35),
            seed: 0,
            ticks: 50,
        }
    }
}

impl GolConfig {
    pub fn validate(&self) -> Result<(), ValidationError> {
        if self.width == 0 || self.height == 0 {
            return Err(ValidationError::Config("board must be at least 1x1".into()));
        }
        if let Some(cells) = &self.alive_cells {
            if let Some([x, y]) = cells.iter().find(|[x, y]| *x >= self.width || *y >= self.height) {
                return Err(ValidationError::Config(format!("cell ({x},{y}) is off the board")));
            }
        }
        if let Some(d) = self.density {
            if !(0.0..=1.0).contains(&d) {
                return Err(ValidationError::Config("density must lie in [0, 1]".into()));
            }
        }
        Ok(())
    }

    /// The starting board. Random boards draw one number per cell, row by row.
    pub fn initial_grid(&self) -> Grid {
        let mut grid = vec![vec![false; self.width]; self.height];
        if let Some(cells) = &self.alive_cells {
            for &[x, y] in cells {
                grid[y][x] = true;
            }
        } else if let Some(density) = self.density {
            let mut rng = SeededRng::new(self.seed);
            for row in &mut grid {
                for cell in row.iter_mut() {
                    *cell = rng.next_f64() < density;
                }
            }
        }
        grid
    }
}

/// One synchronous Conway step on a board with dead borders.
pub fn conway_oracle(grid: &[Vec<bool>]) -> Grid {
    let height = grid.len();
    let mut next = Vec::with_capacity(height);
    for y in 0..height {
        let width = grid[y].len();
        let mut row = Vec::with_capacity(width);
        for x in 0..width {
            let mut live = 0;
            for dy in [-1i64, 0, 1] {
                for dx in [-1i64, 0, 1] {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                    if ny >= 0 && (ny as usize) < height && nx >= 0 && (nx as usize) < grid[ny as usize].len() {
                        live += usize::from(grid[ny as usize][nx as usize]);
                    }
                }
            }
            row.push(matches!((grid[y][x], live), (true, 2) | (_, 3)));
        }
        next.push(row);
    }
    next
}

fn neighbour_counts(grid: &[Vec<bool>]) -> Vec<Vec<u8>> {
    let height = grid.len() as i64;
    grid.iter()
        .enumerate()
        .map(|(y, row)| {
            let width = row.len() as i64;
            (0..row.len())
                .map(|x| {
                    let mut n = 0;
                    for (dx, dy) in NEIGHBOURS {
                        let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                        if (0..width).contains(&nx) && (0..height).contains(&ny) && grid[ny as usize][nx as usize] {
                            n += 1;
                        }
                    }
                    n
                })
                .collect()
        })
        .collect()
}

const NEIGHBOURS: [(i64, i64); 8] = [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)];

pub fn cell_id(x: usize, y: usize) -> String {
    format!("cell-{y:03}-{x:03}")
}

/// Cell agent with the two beliefs `alive` and `neighbours`.
pub fn cell_agent(x: usize, y: usize, alive: bool) -> Agent {
    let register = |alive: bool| vec![ValueRecord::new().with("register", alive)];
    let count = |b: &BeliefMap| b["neighbours"].as_i64().unwrap_or(0);
    let alive_now = |b: &BeliefMap| b["alive"].as_bool().unwrap_or(false);
    let plans = vec![
        Plan::on_beliefs(
            move |b| alive_now(b) && !(2..=3).contains(&count(b)),
            move |_| register(false),
        ),
        Plan::on_beliefs(move |b| !alive_now(b) && count(b) == 3, move |_| register(true)),
    ];
    let beliefs = ValueRecord::new().with("alive", alive).with("neighbours", 0);
    Agent::new(&cell_id(x, y), beliefs, [], plans).expect("valid cell agent")
}

fn grid_value(grid: &[Vec<bool>]) -> Value {
    Value::List(grid.iter().map(|r| Value::from(r.clone())).collect())
}

fn counts_value(counts: &[Vec<u8>]) -> Value {
    Value::List(counts.iter().map(|r| Value::from(r.clone())).collect())
}

/// Reads the board back out of an environment state.
pub fn grid_from_state(state: &ValueRecord) -> Option<Grid> {
    state["grid"]
        .as_list()?
        .iter()
        .map(|row| row.as_list()?.iter().map(Value::as_bool).collect())
        .collect()
}

pub fn render_grid(grid: &[Vec<bool>]) -> Vec<String> {
    grid.iter()
        .map(|row| row.iter().map(|&c| if c { '#' } else { '.' }).collect())
        .collect()
}

pub fn build_game_of_life(cfg: &GolConfig) -> Result<Environment, ValidationError> {
    cfg.validate()?;
    let grid = cfg.initial_grid();
    let (width, height) = (cfg.width, cfg.height);

    let mut agents = Vec::with_capacity(width * height);
    let mut coords = HashMap::with_capacity(width * height);
    for (y, row) in grid.iter().enumerate() {
        for (x, &alive) in row.iter().enumerate() {
            agents.push(cell_agent(x, y, alive));
            coords.insert(cell_id(x, y), (x, y));
        }
    }
    let last = cell_id(width - 1, height - 1);
    let update_coords = coords.clone();

    let update = move |actions: &[Vec<ActionRecord>],
                       id: &str,
                       state: &ValueRecord,
                       _: &mut SeededRng|
          -> Result<StateUpdate, Fault> {
        let &(x, y) = update_coords.get(id).ok_or_else(|| format!("unknown cell `{id}`"))?;
        let registration = actions.iter().flatten().find_map(|a| a["register"].as_bool());
        // registrations wait in flat lists of cell indices until the last cell has acted
        let queued = |key: &str, push: bool| {
            let mut list = state[key].as_list().unwrap_or_default().to_vec();
            if push {
                list.push(Value::from(y * width + x));
            }
            list
        };
        if id != last {
            return Ok(match registration {
                Some(true) => StateUpdate::new(ValueRecord::new().with("births", queued("births", true))),
                Some(false) => StateUpdate::new(ValueRecord::new().with("deaths", queued("deaths", true))),
                None => StateUpdate::default(),
            });
        }
        let births = queued("births", registration == Some(true));
        let deaths = queued("deaths", registration == Some(false));

        let mut grid = grid_from_state(state).ok_or("state has no grid")?;
        for (list, alive) in [(&births, true), (&deaths, false)] {
            for entry in list {
                let i = entry
                    .as_i64()
                    .and_then(|i| usize::try_from(i).ok())
                    .filter(|&i| i < width * height)
                    .ok_or("malformed registration")?;
                grid[i / width][i % width] = alive;
            }
        }
        let live = grid.iter().flatten().filter(|&&c| c).count();
        let generation = state["generation"].as_i64().unwrap_or(0) + 1;
        let update = ValueRecord::new()
            .with("generation", generation)
            .with("grid", grid_value(&grid))
            .with("births", Vec::<Value>::new())
            .with("deaths", Vec::<Value>::new())
            .with("neighbours", counts_value(&neighbour_counts(&grid)));
        Ok(StateUpdate::new(update).log(format!("generation {generation}: {live} alive")))
    };

    let state = ValueRecord::new()
        .with("births", Vec::<Value>::new())
        .with("deaths", Vec::<Value>::new())
        .with("generation", 0)
        .with("grid", grid_value(&grid))
        .with("height", height)
        .with("neighbours", counts_value(&neighbour_counts(&grid)))
        .with("width", width);

    Environment::builder(agents, state, update)
        .state_filter(move |state, id, _| match coords.get(id) {
            Some(&(x, y)) => ValueRecord::new()
                .with("alive", state["grid"][y][x].clone())
                .with("neighbours", state["neighbours"][y][x].clone()),
            None => ValueRecord::new(),
        })
        .render(|state, _| grid_from_state(state).map(|g| render_grid(&g)).unwrap_or_default())
        .seed(cfg.seed)
        .build()
}
