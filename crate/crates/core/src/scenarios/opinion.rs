//! Spread of a single boolean opinion through a society of volatile and
//! introspective agents.
//!
//! Every tick each agent announces its opinion once. When the last agent has
//! announced, the environment builds a weighted pool from the round's
//! announcements and hands every agent two samples for the next tick. An
//! announcement weighs `loudness(kind)`, times `1 + bias` when it is `true`.
//! Samples are drawn with replacement and never include the receiver's own
//! announcement.
//!
//! Agents decide by majority over their current opinion plus the samples in
//! their window: the latest set for volatile agents, the last five sets for
//! introspective ones. Ties keep the current opinion.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agent::{ActionRecord, Agent, BeliefMap, Fault, Plan, PlanResult};
use crate::environment::{Environment, StateUpdate};
use crate::error::ValidationError;
use crate::rng::SeededRng;
use crate::trace::Trace;
use crate::value::{Value, ValueRecord};

/// Announcement sets an introspective agent remembers.
pub const INTROSPECTIVE_WINDOW: usize = 5;
/// Announcements each agent receives per tick.
pub const SAMPLES_PER_AGENT: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AgentKind {
    Volatile,
    Introspective,
}

impl AgentKind {
    pub fn window(self) -> usize {
        match self {
            AgentKind::Volatile => 1,
            AgentKind::Introspective => INTROSPECTIVE_WINDOW,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            AgentKind::Volatile => "volatile",
            AgentKind::Introspective => "introspective",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct OpinionConfig {
    pub agent_count: usize,
    pub volatile_true: usize,
    pub volatile_false: usize,
    pub introspective_true: usize,
    pub introspective_false: usize,
    pub bias: f64,
    pub loudness_volatile: f64,
    pub loudness_introspective: f64,
    pub ticks: u64,
    pub seed: u64,
}

impl Default for OpinionConfig {
    fn default() -> Self {
        OpinionConfig {
            agent_count: 100,
            volatile_true: 30,
            volatile_false: 20,
            introspective_true: 20,
            introspective_false: 30,
            bias: 0.0,
            loudness_volatile: 2.0,
            loudness_introspective: 1.0,
            ticks: 20,
            seed: 0,
        }
    }
}

impl OpinionConfig {
    pub fn validate(&self) -> Result<(), ValidationError> {
        let sum = self.volatile_true + self.volatile_false + self.introspective_true + self.introspective_false;
        if sum != self.agent_count {
            return Err(ValidationError::Config(format!(
                "agent groups sum to {sum}, expected agentCount {}",
                self.agent_count
            )));
        }
        if self.agent_count < 2 {
            return Err(ValidationError::Config("at least two agents are required".into()));
        }
        if !(self.bias.is_finite() && self.bias >= 0.0) {
            return Err(ValidationError::Config("bias must be a non-negative number".into()));
        }
        for (name, w) in [
            ("loudnessVolatile", self.loudness_volatile),
            ("loudnessIntrospective", self.loudness_introspective),
        ] {
            if !(w.is_finite() && w > 0.0) {
                return Err(ValidationError::Config(format!("{name} must be positive")));
            }
        }
        Ok(())
    }

    /// Kind and starting opinion of every agent, in registration order.
    pub fn population(&self) -> Vec<(AgentKind, bool)> {
        let groups = [
            (AgentKind::Volatile, true, self.volatile_true),
            (AgentKind::Volatile, false, self.volatile_false),
            (AgentKind::Introspective, true, self.introspective_true),
            (AgentKind::Introspective, false, self.introspective_false),
        ];
        groups
            .into_iter()
            .flat_map(|(kind, opinion, n)| std::iter::repeat_n((kind, opinion), n))
            .collect()
    }

    fn loudness(&self, kind: AgentKind) -> f64 {
        match kind {
            AgentKind::Volatile => self.loudness_volatile,
            AgentKind::Introspective => self.loudness_introspective,
        }
    }
}

pub fn agent_id(index: usize) -> String {
    format!("agent-{index:04}")
}

/// Majority of `own` plus `received`; a tie keeps `own`.
pub fn decide<'a>(own: bool, received: impl IntoIterator<Item = &'a bool>) -> bool {
    let (mut yes, mut no) = if own { (1, 0) } else { (0, 1) };
    for &b in received {
        if b {
            yes += 1;
        } else {
            no += 1;
        }
    }
    match yes.cmp(&no) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => own,
    }
}

fn bools(value: &Value) -> Vec<bool> {
    value
        .as_list()
        .unwrap_or_default()
        .iter()
        .filter_map(Value::as_bool)
        .collect()
}

fn opinion_plan(kind: AgentKind) -> Plan {
    Plan::on_beliefs(
        |_| true,
        move |b: &BeliefMap| {
            let own = b["opinion"].as_bool().unwrap_or(false);
            let mut history: Vec<Value> = b["history"].as_list().unwrap_or_default().to_vec();
            if let Some(inbox) = b.get("inbox") {
                history.push(inbox.clone());
            }
            let keep = history.len().saturating_sub(kind.window());
            history.drain(..keep);
            let received: Vec<bool> = history.iter().flat_map(bools).collect();
            let opinion = decide(own, &received);
            PlanResult::actions(vec![ValueRecord::new().with("announce", opinion)])
                .with_beliefs(ValueRecord::new().with("opinion", opinion).with("history", history))
        },
    )
}

pub fn opinion_agent(id: &str, kind: AgentKind, opinion: bool) -> Agent {
    let beliefs = ValueRecord::new()
        .with("history", Vec::<Value>::new())
        .with("kind", kind.as_str())
        .with("opinion", opinion);
    Agent::new(id, beliefs, [], vec![opinion_plan(kind)]).expect("valid opinion agent")
}

/// Two samples per agent from the round's announcements, in agent order.
fn sample_inboxes(
    announcements: &[bool],
    kinds: &[AgentKind],
    cfg: &OpinionConfig,
    rng: &mut SeededRng,
) -> ValueRecord {
    let weights: Vec<f64> = announcements
        .iter()
        .zip(kinds)
        .map(|(&a, &k)| cfg.loudness(k) * if a { 1.0 + cfg.bias } else { 1.0 })
        .collect();
    let mut inboxes = ValueRecord::new();
    for receiver in 0..announcements.len() {
        let total: f64 = weights
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != receiver)
            .map(|(_, w)| w)
            .sum();
        let mut inbox = Vec::with_capacity(SAMPLES_PER_AGENT);
        for _ in 0..SAMPLES_PER_AGENT {
            let target = rng.next_f64() * total;
            let mut acc = 0.0;
            let mut picked = None;
            for (j, w) in weights.iter().enumerate() {
                if j == receiver {
                    continue;
                }
                acc += w;
                picked = Some(j);
                if target < acc {
                    break;
                }
            }
            let j = picked.expect("pool has at least one other agent");
            inbox.push(announcements[j]);
        }
        inboxes.insert(agent_id(receiver), inbox);
    }
    inboxes
}

fn announcement_record(round: &[bool]) -> ValueRecord {
    round.iter().enumerate().map(|(i, &b)| (agent_id(i), b)).collect()
}

/// Builds the society from an explicit population.
pub fn build_opinion_population(
    population: &[(AgentKind, bool)],
    cfg: &OpinionConfig,
) -> Result<Environment, ValidationError> {
    let mut cfg = cfg.clone();
    cfg.agent_count = population.len();
    cfg.volatile_true = population.iter().filter(|p| **p == (AgentKind::Volatile, true)).count();
    cfg.volatile_false = population
        .iter()
        .filter(|p| **p == (AgentKind::Volatile, false))
        .count();
    cfg.introspective_true = population
        .iter()
        .filter(|p| **p == (AgentKind::Introspective, true))
        .count();
    cfg.introspective_false = population
        .iter()
        .filter(|p| **p == (AgentKind::Introspective, false))
        .count();
    cfg.validate()?;

    let agents = population
        .iter()
        .enumerate()
        .map(|(i, &(kind, opinion))| opinion_agent(&agent_id(i), kind, opinion))
        .collect();
    let kinds: Vec<AgentKind> = population.iter().map(|p| p.0).collect();
    let initial: Vec<bool> = population.iter().map(|p| p.1).collect();
    let last = agent_id(population.len() - 1);

    let update_cfg = cfg.clone();
    let update_kinds = kinds.clone();
    let update = move |actions: &[Vec<ActionRecord>],
                       id: &str,
                       state: &ValueRecord,
                       rng: &mut SeededRng|
          -> Result<StateUpdate, Fault> {
        let announced = actions
            .iter()
            .flatten()
            .find_map(|a| a["announce"].as_bool())
            .ok_or_else(|| format!("agent `{id}` did not announce"))?;
        // announcements of the current round, in agent order
        let mut pending: Vec<Value> = state["pending"].as_list().unwrap_or_default().to_vec();
        if agent_id(pending.len()) != id {
            return Err(format!("agent `{id}` announced out of turn").into());
        }
        pending.push(announced.into());
        if id != last {
            return Ok(StateUpdate::new(ValueRecord::new().with("pending", pending)));
        }

        let round: Vec<bool> = pending
            .iter()
            .map(Value::as_bool)
            .collect::<Option<_>>()
            .ok_or("round holds a non-boolean announcement")?;
        let inbox = sample_inboxes(&round, &update_kinds, &update_cfg, rng);
        let yes = round.iter().filter(|&&b| b).count();
        let number = state["round"].as_i64().unwrap_or(0) + 1;
        let update = ValueRecord::new()
            .with("announcements", announcement_record(&round))
            .with("inbox", inbox)
            .with("pending", Vec::<Value>::new())
            .with("round", number);
        Ok(StateUpdate::new(update).log(format!("round {number}: {yes} true, {} false", round.len() - yes)))
    };

    let mut env = Environment::builder(agents, ValueRecord::new(), update)
        .state_filter(|state, id, _| ValueRecord::new().with("inbox", state["inbox"][id].clone()))
        .render(|state, tick| {
            let yes = state["announcements"]
                .as_record()
                .map_or(0, |r| r.iter().filter(|(_, v)| **v == true).count());
            let total = state["announcements"].as_record().map_or(0, ValueRecord::len);
            vec![format!("tick {tick}: {yes} true, {} false", total - yes)]
        })
        .seed(cfg.seed)
        .build()?;

    // the opening announcements are the starting opinions
    let inbox = sample_inboxes(&initial, &kinds, &cfg, env.rng_mut());
    env.set_state(
        ValueRecord::new()
            .with("announcements", announcement_record(&initial))
            .with("inbox", inbox)
            .with("pending", Vec::<Value>::new())
            .with("round", 0),
    )?;
    Ok(env)
}

pub fn build_opinion_spread(cfg: &OpinionConfig) -> Result<Environment, ValidationError> {
    cfg.validate()?;
    build_opinion_population(&cfg.population(), cfg)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OpinionTick {
    pub false_count: usize,
    pub tick: u64,
    pub true_count: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("tick {tick}: agent `{agent}` has no announcement")]
pub struct ShapeError {
    pub tick: u64,
    pub agent: String,
}

/// Per-tick announcement counts of an opinion-spread trace.
pub fn opinion_stats(trace: &Trace) -> Result<Vec<OpinionTick>, ShapeError> {
    trace
        .ticks
        .iter()
        .map(|record| {
            let mut stats = OpinionTick {
                false_count: 0,
                tick: record.tick,
                true_count: 0,
            };
            for step in &record.per_agent {
                let announced = step
                    .actions
                    .iter()
                    .flatten()
                    .find_map(|a| a["announce"].as_bool())
                    .ok_or_else(|| ShapeError {
                        tick: record.tick,
                        agent: step.agent_id.clone(),
                    })?;
                if announced {
                    stats.true_count += 1;
                } else {
                    stats.false_count += 1;
                }
            }
            Ok(stats)
        })
        .collect()
}
