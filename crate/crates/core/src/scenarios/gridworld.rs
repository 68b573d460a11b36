//! Grid-world arena with mountains, money, repair and plain fields.
//!
//! Approaching a money field pays one coin and approaching a repair field
//! restores one health unit; in both cases the agent stays where it is.
//! Moving onto an occupied plain field is rejected and costs both agents
//! `collision_damage` health. An agent whose health drops to zero pays
//! `bankruptcy_penalty` coins (balances may go negative) and is restored to
//! full health.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agent::{ActionRecord, Agent, BeliefMap, Fault, Plan, PlanResult};
use crate::environment::{Environment, StateUpdate};
use crate::error::ValidationError;
use crate::rng::SeededRng;
use crate::value::{Value, ValueRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldType {
    Mountain,
    Money,
    Repair,
    Plain,
}

impl FieldType {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'M' => Some(FieldType::Mountain),
            '$' => Some(FieldType::Money),
            '+' => Some(FieldType::Repair),
            '.' => Some(FieldType::Plain),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            FieldType::Mountain => 'M',
            FieldType::Money => '$',
            FieldType::Repair => '+',
            FieldType::Plain => '.',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    North,
    South,
    East,
    West,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::North, Direction::South, Direction::East, Direction::West];

    fn delta(self) -> (i64, i64) {
        match self {
            Direction::North => (0, -1),
            Direction::South => (0, 1),
            Direction::East => (1, 0),
            Direction::West => (-1, 0),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::North => "N",
            Direction::South => "S",
            Direction::East => "E",
            Direction::West => "W",
        }
    }
}

impl FromStr for Direction {
    type Err = MoveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "N" => Ok(Direction::North),
            "S" => Ok(Direction::South),
            "E" => Ok(Direction::East),
            "W" => Ok(Direction::West),
            other => Err(MoveError::InvalidDirection(other.to_owned())),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MoveError {
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("invalid direction `{0}`")]
    InvalidDirection(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentStats {
    pub coins: i64,
    pub health: u32,
    pub x: usize,
    pub y: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MoveEvent {
    Stayed { agent: String, reason: &'static str },
    Moved { agent: String, x: usize, y: usize },
    CoinCollected { agent: String },
    Repaired { agent: String, health: u32 },
    Collision { agent: String, other: String },
    Bankrupt { agent: String, penalty: i64 },
}

impl fmt::Display for MoveEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MoveEvent::Stayed { agent, reason } => write!(f, "{agent}: stays ({reason})"),
            MoveEvent::Moved { agent, x, y } => write!(f, "{agent}: moves to ({x},{y})"),
            MoveEvent::CoinCollected { agent } => write!(f, "{agent}: collects a coin"),
            MoveEvent::Repaired { agent, health } => write!(f, "{agent}: repaired to {health}"),
            MoveEvent::Collision { agent, other } => write!(f, "{agent}: collides with {other}"),
            MoveEvent::Bankrupt { agent, penalty } => write!(f, "{agent}: bankrupt, pays {penalty} coins"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arena {
    pub width: usize,
    pub height: usize,
    pub fields: Vec<FieldType>,
    pub agents: BTreeMap<String, AgentStats>,
    pub max_health: u32,
    pub collision_damage: u32,
    pub bankruptcy_penalty: i64,
}

impl Arena {
    pub fn field(&self, x: usize, y: usize) -> FieldType {
        self.fields[y * self.width + x]
    }

    fn occupant(&self, x: usize, y: usize) -> Option<&str> {
        self.agents
            .iter()
            .find(|(_, s)| s.x == x && s.y == y)
            .map(|(id, _)| id.as_str())
    }

    fn target(&self, x: usize, y: usize, direction: Direction) -> Option<(usize, usize)> {
        let (dx, dy) = direction.delta();
        let (nx, ny) = (x as i64 + dx, y as i64 + dy);
        ((0..self.width as i64).contains(&nx) && (0..self.height as i64).contains(&ny))
            .then_some((nx as usize, ny as usize))
    }

    /// Directions that stay on the grid and do not run into a mountain.
    pub fn passable_directions(&self, x: usize, y: usize) -> Vec<Direction> {
        Direction::ALL
            .into_iter()
            .filter(|&d| {
                self.target(x, y, d)
                    .is_some_and(|(tx, ty)| self.field(tx, ty) != FieldType::Mountain)
            })
            .collect()
    }

    fn damage(&mut self, id: &str, events: &mut Vec<MoveEvent>) {
        let max = self.max_health;
        let penalty = self.bankruptcy_penalty;
        let stats = self.agents.get_mut(id).expect("agent present");
        stats.health = stats.health.saturating_sub(self.collision_damage);
        if stats.health == 0 {
            stats.coins -= penalty;
            stats.health = max;
            events.push(MoveEvent::Bankrupt {
                agent: id.to_owned(),
                penalty,
            });
        }
    }

    /// Applies one move request and reports what happened.
    pub fn resolve_move(&mut self, agent: &str, direction: Direction) -> Result<Vec<MoveEvent>, MoveError> {
        let stats = *self
            .agents
            .get(agent)
            .ok_or_else(|| MoveError::UnknownAgent(agent.to_owned()))?;
        let stay = |reason| {
            vec![MoveEvent::Stayed {
                agent: agent.to_owned(),
                reason,
            }]
        };
        let Some((tx, ty)) = self.target(stats.x, stats.y, direction) else {
            return Ok(stay("off grid"));
        };
        let mut events = Vec::new();
        match self.field(tx, ty) {
            FieldType::Mountain => return Ok(stay("mountain")),
            FieldType::Money => {
                self.agents.get_mut(agent).expect("agent present").coins += 1;
                events.push(MoveEvent::CoinCollected {
                    agent: agent.to_owned(),
                });
            }
            FieldType::Repair => {
                if stats.health >= self.max_health {
                    return Ok(stay("fully repaired"));
                }
                let s = self.agents.get_mut(agent).expect("agent present");
                s.health += 1;
                events.push(MoveEvent::Repaired {
                    agent: agent.to_owned(),
                    health: s.health,
                });
            }
            FieldType::Plain => match self.occupant(tx, ty).map(str::to_owned) {
                None => {
                    let s = self.agents.get_mut(agent).expect("agent present");
                    s.x = tx;
                    s.y = ty;
                    events.push(MoveEvent::Moved {
                        agent: agent.to_owned(),
                        x: tx,
                        y: ty,
                    });
                }
                Some(other) => {
                    events.push(MoveEvent::Collision {
                        agent: agent.to_owned(),
                        other: other.clone(),
                    });
                    self.damage(agent, &mut events);
                    self.damage(&other, &mut events);
                }
            },
        }
        Ok(events)
    }

    fn map_rows(&self) -> Vec<String> {
        self.fields
            .chunks(self.width)
            .map(|row| row.iter().map(|f| f.to_char()).collect())
            .collect()
    }

    /// The arena as environment state: a static `map` and mutable `agents`.
    pub fn to_state(&self) -> ValueRecord {
        let map = ValueRecord::new()
            .with("bankruptcyPenalty", self.bankruptcy_penalty)
            .with("collisionDamage", self.collision_damage)
            .with("fields", self.map_rows())
            .with("height", self.height)
            .with("maxHealth", self.max_health)
            .with("width", self.width);
        ValueRecord::new()
            .with("agents", agents_value(&self.agents))
            .with("map", map)
    }

    pub fn from_state(state: &ValueRecord) -> Option<Arena> {
        let map = state.get("map")?;
        let width = map["width"].as_i64()? as usize;
        let height = map["height"].as_i64()? as usize;
        let fields = map["fields"]
            .as_list()?
            .iter()
            .flat_map(|row| row.as_str().unwrap_or("?").chars().map(FieldType::from_char))
            .collect::<Option<Vec<_>>>()?;
        if fields.len() != width * height {
            return None;
        }
        let mut agents = BTreeMap::new();
        for (id, s) in state["agents"].as_record()?.iter() {
            agents.insert(
                id.to_owned(),
                AgentStats {
                    coins: s["coins"].as_i64()?,
                    health: u32::try_from(s["health"].as_i64()?).ok()?,
                    x: s["x"].as_i64()? as usize,
                    y: s["y"].as_i64()? as usize,
                },
            );
        }
        Some(Arena {
            width,
            height,
            fields,
            agents,
            max_health: u32::try_from(map["maxHealth"].as_i64()?).ok()?,
            collision_damage: u32::try_from(map["collisionDamage"].as_i64()?).ok()?,
            bankruptcy_penalty: map["bankruptcyPenalty"].as_i64()?,
        })
    }
}

fn agents_value(agents: &BTreeMap<String, AgentStats>) -> ValueRecord {
    agents
        .iter()
        .map(|(id, s)| {
            let stats = ValueRecord::new()
                .with("coins", s.coins)
                .with("health", s.health)
                .with("x", s.x)
                .with("y", s.y);
            (id.clone(), stats)
        })
        .collect()
}

pub const DEFAULT_MAP: [&str; 20] = [
    "....................",
    ".MM......$.......MM.",
    ".M................M.",
    ".....+......+.......",
    "..$....MMMM....$....",
    ".......M..M.........",
    "...........$........",
    ".+.....M..M......+..",
    ".......MMMM.........",
    "....$..........$....",
    "....................",
    "..MMM........MMM....",
    ".........$$.........",
    ".+..................",
    ".....M........M..+..",
    ".....M...$....M.....",
    ".....MMM...MMMM.....",
    "..$..............$..",
    ".MM..............MM.",
    "....................",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct GridWorldConfig {
    pub width: usize,
    pub height: usize,
    /// One string per row: `M` mountain, `$` money, `+` repair, `.` plain.
    pub field_map: Vec<String>,
    /// Starting `[x, y]` of each agent.
    pub agent_starts: Vec<[usize; 2]>,
    pub max_health: u32,
    pub collision_damage: u32,
    pub bankruptcy_penalty: i64,
    pub ticks: u64,
    pub seed: u64,
}

impl Default for GridWorldConfig {
    fn default() -> Self {
        GridWorldConfig {
            width: 20,
            height: 20,
            field_map: DEFAULT_MAP.iter().map(|r| r.to_string()).collect(),
            agent_starts: vec![[0, 0], [19, 0], [0, 19], [19, 19], [10, 10], [4, 6]],
            max_health: 10,
            collision_damage: 10,
            bankruptcy_penalty: 100,
            ticks: 100,
            seed: 0,
        }
    }
}

impl GridWorldConfig {
    /// Validates the configuration and lays out the starting arena.
    pub fn arena(&self) -> Result<Arena, ValidationError> {
        let bad = |msg: String| Err(ValidationError::Config(msg));
        if self.width == 0 || self.height == 0 {
            return bad("arena must be at least 1x1".into());
        }
        if self.max_health == 0 {
            return bad("maxHealth must be positive".into());
        }
        if self.field_map.len() != self.height {
            return bad(format!(
                "fieldMap has {} rows, expected {}",
                self.field_map.len(),
                self.height
            ));
        }
        let mut fields = Vec::with_capacity(self.width * self.height);
        for (y, row) in self.field_map.iter().enumerate() {
            if row.chars().count() != self.width {
                return bad(format!("fieldMap row {y} is not {} fields wide", self.width));
            }
            for c in row.chars() {
                match FieldType::from_char(c) {
                    Some(f) => fields.push(f),
                    None => return bad(format!("unknown field `{c}` in row {y}")),
                }
            }
        }
        let mut agents = BTreeMap::new();
        for (i, &[x, y]) in self.agent_starts.iter().enumerate() {
            if x >= self.width || y >= self.height || fields[y * self.width + x] != FieldType::Plain {
                return bad(format!("agent {i} must start on a plain field, got ({x},{y})"));
            }
            if agents.values().any(|s: &AgentStats| s.x == x && s.y == y) {
                return bad(format!("agent {i} shares its start ({x},{y})"));
            }
            let stats = AgentStats {
                coins: 0,
                health: self.max_health,
                x,
                y,
            };
            agents.insert(rover_id(i), stats);
        }
        Ok(Arena {
            width: self.width,
            height: self.height,
            fields,
            agents,
            max_health: self.max_health,
            collision_damage: self.collision_damage,
            bankruptcy_penalty: self.bankruptcy_penalty,
        })
    }
}

pub fn rover_id(index: usize) -> String {
    format!("rover-{index}")
}

/// Random-walk agent. Its generator state lives in the `rng` belief (hex
/// text, since numbers cannot hold 64 bits exactly), so the policy stays a
/// pure function of beliefs.
pub fn random_walker(id: &str, seed: u64) -> Agent {
    let plan = Plan::on_beliefs(
        |b| b["options"].as_list().is_some_and(|o| !o.is_empty()),
        |b: &BeliefMap| {
            let state = b["rng"]
                .as_str()
                .and_then(|s| u64::from_str_radix(s, 16).ok())
                .unwrap_or(0);
            let mut rng = SeededRng::new(state);
            let options = b["options"].as_list().unwrap_or_default();
            let choice = options[rng.below(options.len() as u64) as usize].clone();
            PlanResult::actions(vec![ValueRecord::new().with("move", choice)])
                .with_beliefs(ValueRecord::new().with("rng", format!("{:016x}", rng.state())))
        },
    );
    let beliefs = ValueRecord::new().with("rng", format!("{seed:016x}"));
    Agent::new(id, beliefs, [], vec![plan]).expect("valid walker")
}

/// Processes one agent's move request against the arena held in `state`.
pub fn update_arena(
    actions: &[Vec<ActionRecord>],
    agent_id: &str,
    state: &ValueRecord,
    _rng: &mut SeededRng,
) -> Result<StateUpdate, Fault> {
    let Some(request) = actions.iter().flatten().find_map(|a| a.get("move")) else {
        return Ok(StateUpdate::default());
    };
    let direction: Direction = request
        .as_str()
        .ok_or_else(|| MoveError::InvalidDirection(request.to_canonical_json()))?
        .parse()?;
    let mut arena = Arena::from_state(state).ok_or("state does not hold an arena")?;
    let events = arena.resolve_move(agent_id, direction)?;
    Ok(StateUpdate {
        state: ValueRecord::new().with("agents", agents_value(&arena.agents)),
        log: events.iter().map(ToString::to_string).collect(),
    })
}

fn perceive(state: &ValueRecord, agent_id: &str, _: &BeliefMap) -> ValueRecord {
    let Some(arena) = Arena::from_state(state) else {
        return ValueRecord::new();
    };
    let Some(s) = arena.agents.get(agent_id) else {
        return ValueRecord::new();
    };
    let options: Vec<Value> = arena
        .passable_directions(s.x, s.y)
        .into_iter()
        .map(|d| d.as_str().into())
        .collect();
    ValueRecord::new()
        .with("coins", s.coins)
        .with("health", s.health)
        .with("options", options)
        .with("position", vec![s.x, s.y])
}

pub fn build_grid_world(cfg: &GridWorldConfig) -> Result<Environment, ValidationError> {
    let arena = cfg.arena()?;
    let mut seeds = SeededRng::new(cfg.seed);
    let agents = arena
        .agents
        .keys()
        .map(|id| random_walker(id, seeds.next_u64()))
        .collect();
    Environment::builder(agents, arena.to_state(), update_arena)
        .state_filter(perceive)
        .render(|state, _| {
            let Some(arena) = Arena::from_state(state) else {
                return Vec::new();
            };
            let mut rows: Vec<Vec<char>> = arena.map_rows().iter().map(|r| r.chars().collect()).collect();
            for (i, s) in arena.agents.values().enumerate() {
                rows[s.y][s.x] = char::from_digit(i as u32 % 36, 36).unwrap_or('@');
            }
            rows.into_iter().map(String::from_iter).collect()
        })
        .seed(cfg.seed)
        .build()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 3x3 arena: `$` north of the centre, `+` east, `M` west, plain south.
    fn arena() -> Arena {
        let cfg = GridWorldConfig {
            width: 3,
            height: 3,
            field_map: vec![".$.".into(), "M.+".into(), "...".into()],
            agent_starts: vec![[1, 1], [1, 2]],
            ..Default::default()
        };
        cfg.arena().unwrap()
    }

    fn stats(a: &Arena, id: &str) -> AgentStats {
        a.agents[id]
    }

    #[test]
    fn money_pays_and_keeps_position() {
        let mut a = arena();
        let events = a.resolve_move("rover-0", Direction::North).unwrap();
        assert_eq!(
            events,
            [MoveEvent::CoinCollected {
                agent: "rover-0".into()
            }]
        );
        let s = stats(&a, "rover-0");
        assert_eq!((s.coins, s.x, s.y), (1, 1, 1));
    }

    #[test]
    fn repair_heals_damaged_agents_up_to_the_cap() {
        let mut a = arena();
        a.agents.get_mut("rover-0").unwrap().health = 7;
        a.resolve_move("rover-0", Direction::East).unwrap();
        let s = stats(&a, "rover-0");
        assert_eq!((s.health, s.x, s.y), (8, 1, 1));

        let mut full = arena();
        let before = full.clone();
        let events = full.resolve_move("rover-0", Direction::East).unwrap();
        assert!(matches!(events[0], MoveEvent::Stayed { .. }));
        assert_eq!(full, before);
    }

    #[test]
    fn mountains_and_edges_reject_moves() {
        let mut a = arena();
        let before = a.clone();
        a.resolve_move("rover-0", Direction::West).unwrap();
        assert_eq!(a, before);
        a.resolve_move("rover-1", Direction::South).unwrap();
        assert_eq!(a, before);
    }

    #[test]
    fn free_plain_fields_are_entered() {
        let mut a = arena();
        a.resolve_move("rover-1", Direction::East).unwrap();
        let s = stats(&a, "rover-1");
        assert_eq!((s.x, s.y), (2, 2));
    }

    #[test]
    fn collision_at_full_health_bankrupts_both() {
        let mut a = arena();
        let events = a.resolve_move("rover-0", Direction::South).unwrap();
        assert_eq!(events.len(), 3);
        for id in ["rover-0", "rover-1"] {
            let s = stats(&a, id);
            assert_eq!((s.coins, s.health), (-100, 10));
        }
        assert_eq!((stats(&a, "rover-0").x, stats(&a, "rover-0").y), (1, 1));
    }

    #[test]
    fn collision_damage_without_bankruptcy() {
        let mut cfg = GridWorldConfig {
            width: 3,
            height: 3,
            field_map: vec![".$.".into(), "M.+".into(), "...".into()],
            agent_starts: vec![[1, 1], [1, 2]],
            ..Default::default()
        };
        cfg.max_health = 25;
        let mut a = cfg.arena().unwrap();
        a.resolve_move("rover-1", Direction::North).unwrap();
        assert_eq!(stats(&a, "rover-0").health, 15);
        assert_eq!(stats(&a, "rover-1").health, 15);
        assert_eq!(stats(&a, "rover-0").coins, 0);
    }

    #[test]
    fn unknown_agent_and_bad_direction() {
        let mut a = arena();
        assert_eq!(
            a.resolve_move("ghost", Direction::North),
            Err(MoveError::UnknownAgent("ghost".into()))
        );
        assert_eq!("Q".parse::<Direction>(), Err(MoveError::InvalidDirection("Q".into())));
    }

    #[test]
    fn state_round_trip() {
        let a = arena();
        assert_eq!(Arena::from_state(&a.to_state()), Some(a));
    }

    #[test]
    fn default_config_is_valid() {
        let a = GridWorldConfig::default().arena().unwrap();
        assert_eq!((a.width, a.height), (20, 20));
        assert_eq!(a.agents.len(), 6);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut cfg = GridWorldConfig::default();
        cfg.agent_starts.push([1, 1]);
        assert!(build_grid_world(&cfg).is_err());
        let cfg = GridWorldConfig {
            agent_starts: vec![[0, 0], [0, 0]],
            ..Default::default()
        };
        assert!(cfg.arena().is_err());
        let cfg = GridWorldConfig {
            height: 19,
            ..Default::default()
        };
        assert!(cfg.arena().is_err());
    }

    #[test]
    fn walkers_never_pick_mountains() {
        let mut env = build_grid_world(&GridWorldConfig::default()).unwrap();
        for record in env.run(200).unwrap().ticks {
            assert!(record
                .log_events()
                .all(|e| !e.contains("mountain") && !e.contains("off grid")));
        }
    }

    #[test]
    fn invalid_move_request_faults() {
        let state = arena().to_state();
        let actions = vec![vec![ValueRecord::new().with("move", "up")]];
        assert!(update_arena(&actions, "rover-0", &state, &mut SeededRng::new(0)).is_err());
    }
}
