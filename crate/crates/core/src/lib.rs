//! Belief-desire-intention agents running in a synchronous, deterministic
//! environment loop, plus four ready-made scenarios.
//!
//! ```
//! use agentloop::{Agent, Environment, Plan, StateUpdate, ValueRecord};
//!
//! let greeter = Agent::new(
//!     "greeter",
//!     ValueRecord::new(),
//!     [],
//!     vec![Plan::on_beliefs(|_| true, |_| vec![ValueRecord::new().with("say", "hi")])],
//! )?;
//! let mut env = Environment::new(vec![greeter], ValueRecord::new(), |actions, id, _, _| {
//!     let said = actions[0][0]["say"].as_str().unwrap_or_default().to_owned();
//!     Ok(StateUpdate::default().log(format!("{id}: {said}")))
//! })?;
//! let trace = env.run(2)?;
//! assert_eq!(trace.ticks[1].per_agent[0].log_events, ["greeter: hi"]);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod agent;
pub mod environment;
pub mod error;
pub mod rng;
pub mod scenarios;
pub mod trace;
pub mod value;

pub use agent::{
    belief, default_preference_generator, ActionRecord, Agent, AgentFault, BeliefMap, Desire, Desires, Fault,
    FaultStage, Intention, Plan, PlanResult, PreferenceGenerator, ReasoningMode,
};
pub use environment::{
    default_render, default_state_filter, Environment, EnvironmentBuilder, EnvironmentError, FaultPolicy, StateUpdate,
    TickFault,
};
pub use error::{ParseError, ValidationError};
pub use rng::SeededRng;
pub use trace::{deserialize_trace, serialize_trace, AgentStep, TickRecord, Trace, TraceError};
pub use value::{deep_equal, shallow_merge, Number, Value, ValueRecord};
