//! The synchronous environment loop.
//!
//! Each tick visits agents in registration order. For every agent the
//! environment filters the current state into a perceived update, runs the
//! agent's reasoning cycle, passes the actions to the update function and
//! shallow-merges the returned state update before moving to the next agent.
//! Render runs once after all agents.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::agent::{ActionRecord, Agent, AgentFault, BeliefMap, Fault};
use crate::error::ValidationError;
use crate::rng::SeededRng;
use crate::trace::{AgentStep, TickRecord, Trace};
use crate::value::ValueRecord;

/// Result of processing one agent's actions.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StateUpdate {
    pub state: ValueRecord,
    pub log: Vec<String>,
}

impl StateUpdate {
    pub fn new(state: ValueRecord) -> Self {
        StateUpdate { state, log: Vec::new() }
    }

    pub fn log(mut self, line: impl Into<String>) -> Self {
        self.log.push(line.into());
        self
    }
}

type UpdateFn =
    dyn Fn(&[Vec<ActionRecord>], &str, &ValueRecord, &mut SeededRng) -> Result<StateUpdate, Fault> + Send + Sync;
type RenderFn = dyn Fn(&ValueRecord, u64) -> Vec<String> + Send + Sync;
type FilterFn = dyn Fn(&ValueRecord, &str, &BeliefMap) -> ValueRecord + Send + Sync;

/// What a tick does when an agent or the update function fails.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FaultPolicy {
    /// Abort the tick and surface the error with the partial record.
    #[default]
    Halt,
    /// Drop the failing agent's contribution and log the fault.
    SkipAgent,
}

#[derive(Debug, Error)]
pub enum TickFault {
    #[error(transparent)]
    Agent(#[from] AgentFault),
    #[error("update function failed for agent `{agent}`: {source}")]
    Update {
        agent: String,
        #[source]
        source: Fault,
    },
}

#[derive(Debug, Error)]
#[error("tick {tick} halted: {fault}")]
pub struct EnvironmentError {
    pub tick: u64,
    pub fault: TickFault,
    /// Everything recorded before the fault. The environment's state and the
    /// beliefs of agents already visited keep their changes.
    pub partial: Box<TickRecord>,
}

/// Identity state filter: every agent perceives the whole state.
pub fn default_state_filter(state: &ValueRecord, _agent_id: &str, _beliefs: &BeliefMap) -> ValueRecord {
    state.clone()
}

/// Logs the full state as one canonical JSON line.
pub fn default_render(state: &ValueRecord, _tick: u64) -> Vec<String> {
    vec![state.to_canonical_json()]
}

pub struct EnvironmentBuilder {
    agents: Vec<Agent>,
    state: ValueRecord,
    update: Box<UpdateFn>,
    render: Box<RenderFn>,
    filter: Box<FilterFn>,
    seed: u64,
    policy: FaultPolicy,
}

impl EnvironmentBuilder {
    pub fn render<F>(mut self, render: F) -> Self
    where
        F: Fn(&ValueRecord, u64) -> Vec<String> + Send + Sync + 'static,
    {
        self.render = Box::new(render);
        self
    }

    pub fn state_filter<F>(mut self, filter: F) -> Self
    where
        F: Fn(&ValueRecord, &str, &BeliefMap) -> ValueRecord + Send + Sync + 'static,
    {
        self.filter = Box::new(filter);
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn fault_policy(mut self, policy: FaultPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn build(self) -> Result<Environment, ValidationError> {
        let mut seen = HashSet::new();
        for agent in &self.agents {
            if !seen.insert(agent.id()) {
                return Err(ValidationError::DuplicateAgent(agent.id().to_owned()));
            }
        }
        self.state.validate()?;
        Ok(Environment {
            agents: self.agents,
            state: self.state,
            update: self.update,
            render: self.render,
            filter: self.filter,
            tick: 0,
            rng: SeededRng::new(self.seed),
            policy: self.policy,
            trace: Trace::new(self.seed),
        })
    }
}

pub struct Environment {
    agents: Vec<Agent>,
    state: ValueRecord,
    update: Box<UpdateFn>,
    render: Box<RenderFn>,
    filter: Box<FilterFn>,
    tick: u64,
    rng: SeededRng,
    policy: FaultPolicy,
    trace: Trace,
}

impl fmt::Debug for Environment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Environment")
            .field("agents", &self.agents.iter().map(Agent::id).collect::<Vec<_>>())
            .field("tick", &self.tick)
            .field("seed", &self.trace.seed)
            .field("policy", &self.policy)
            .finish_non_exhaustive()
    }
}

impl Environment {
    /// Starts building an environment. Defaults: state-logging render,
    /// identity state filter, seed 0, [`FaultPolicy::Halt`].
    pub fn builder<U>(agents: Vec<Agent>, state: ValueRecord, update: U) -> EnvironmentBuilder
    where
        U: Fn(&[Vec<ActionRecord>], &str, &ValueRecord, &mut SeededRng) -> Result<StateUpdate, Fault>
            + Send
            + Sync
            + 'static,
    {
        EnvironmentBuilder {
            agents,
            state,
            update: Box::new(update),
            render: Box::new(default_render),
            filter: Box::new(default_state_filter),
            seed: 0,
            policy: FaultPolicy::Halt,
        }
    }

    /// Environment with all defaults.
    pub fn new<U>(agents: Vec<Agent>, state: ValueRecord, update: U) -> Result<Self, ValidationError>
    where
        U: Fn(&[Vec<ActionRecord>], &str, &ValueRecord, &mut SeededRng) -> Result<StateUpdate, Fault>
            + Send
            + Sync
            + 'static,
    {
        Self::builder(agents, state, update).build()
    }

    pub fn state(&self) -> &ValueRecord {
        &self.state
    }

    /// Replaces the state wholesale, e.g. for scenario setup before the first
    /// tick.
    pub fn set_state(&mut self, state: ValueRecord) -> Result<(), ValidationError> {
        state.validate()?;
        self.state = state;
        Ok(())
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn agent(&self, id: &str) -> Option<&Agent> {
        self.agents.iter().find(|a| a.id() == id)
    }

    /// Number of completed ticks.
    pub fn current_tick(&self) -> u64 {
        self.tick
    }

    pub fn seed(&self) -> u64 {
        self.trace.seed
    }

    pub fn rng_mut(&mut self) -> &mut SeededRng {
        &mut self.rng
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    pub fn into_trace(self) -> Trace {
        self.trace
    }

    /// Runs one full pass over all agents.
    pub fn tick(&mut self) -> Result<TickRecord, EnvironmentError> {
        self.advance()?;
        Ok(self.trace.ticks.last().cloned().expect("tick was recorded"))
    }

    fn advance(&mut self) -> Result<(), EnvironmentError> {
        let tick = self.tick + 1;
        let mut per_agent = Vec::with_capacity(self.agents.len());

        for agent in &mut self.agents {
            let perceived = (self.filter)(&self.state, agent.id(), agent.beliefs());
            let step = match Self::step(agent, perceived, &self.state, &*self.update, &mut self.rng) {
                Ok(step) => step,
                Err(failed) => match (self.policy, *failed) {
                    (FaultPolicy::Halt, (step, fault)) => {
                        per_agent.push(step);
                        let partial = TickRecord {
                            per_agent,
                            render_lines: Vec::new(),
                            state_after: self.state.clone(),
                            tick,
                        };
                        return Err(EnvironmentError {
                            tick,
                            fault,
                            partial: Box::new(partial),
                        });
                    }
                    (FaultPolicy::SkipAgent, (mut step, fault)) => {
                        step.actions.clear();
                        step.state_update = ValueRecord::new();
                        step.log_events = vec![format!("fault: {fault}")];
                        step
                    }
                },
            };
            self.state.merge(&step.state_update);
            per_agent.push(step);
        }

        let render_lines = (self.render)(&self.state, tick);
        self.tick = tick;
        self.trace.ticks.push(TickRecord {
            per_agent,
            render_lines,
            state_after: self.state.clone(),
            tick,
        });
        Ok(())
    }

    fn step(
        agent: &mut Agent,
        perceived: ValueRecord,
        state: &ValueRecord,
        update: &UpdateFn,
        rng: &mut SeededRng,
    ) -> Result<AgentStep, Box<(AgentStep, TickFault)>> {
        let mut step = AgentStep {
            actions: Vec::new(),
            agent_id: agent.id().to_owned(),
            log_events: Vec::new(),
            perceived_update: perceived,
            state_update: ValueRecord::new(),
        };
        if let Err(e) = step.perceived_update.validate() {
            let fault = TickFault::Update {
                agent: step.agent_id.clone(),
                source: format!("state filter produced an invalid record: {e}").into(),
            };
            return Err(Box::new((step, fault)));
        }
        match agent.next(&step.perceived_update) {
            Ok(actions) => step.actions = actions,
            Err(fault) => return Err(Box::new((step, fault.into()))),
        }
        let result = update(&step.actions, &step.agent_id, state, rng)
            .and_then(|u| u.state.validate().map(|_| u).map_err(Fault::from));
        match result {
            Ok(u) => {
                step.state_update = u.state;
                step.log_events = u.log;
                Ok(step)
            }
            Err(source) => {
                let fault = TickFault::Update {
                    agent: step.agent_id.clone(),
                    source,
                };
                Err(Box::new((step, fault)))
            }
        }
    }

    /// Runs `iterations` ticks and returns the environment's whole trace.
    pub fn run(&mut self, iterations: u64) -> Result<Trace, EnvironmentError> {
        for _ in 0..iterations {
            self.advance()?;
        }
        Ok(self.trace.clone())
    }
}
