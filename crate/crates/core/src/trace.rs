//! Per-tick records of an environment run and their canonical JSON form.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agent::ActionRecord;
use crate::error::ParseError;
use crate::value::ValueRecord;

// Field order below is the lexicographic order of the serialized names so
// that derived serialization is canonical.

/// What happened to one agent during one tick.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct AgentStep {
    pub actions: Vec<Vec<ActionRecord>>,
    pub agent_id: String,
    pub log_events: Vec<String>,
    pub perceived_update: ValueRecord,
    pub state_update: ValueRecord,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct TickRecord {
    pub per_agent: Vec<AgentStep>,
    pub render_lines: Vec<String>,
    pub state_after: ValueRecord,
    pub tick: u64,
}

impl TickRecord {
    /// All log events of the tick, in agent order.
    pub fn log_events(&self) -> impl Iterator<Item = &str> {
        self.per_agent
            .iter()
            .flat_map(|s| s.log_events.iter().map(String::as_str))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Trace {
    pub seed: u64,
    pub ticks: Vec<TickRecord>,
}

#[derive(Debug, Error, PartialEq)]
pub enum TraceError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("tick records must be contiguous from 1: expected {expected}, found {found}")]
    NonContiguous { expected: u64, found: u64 },
}

impl Trace {
    pub fn new(seed: u64) -> Self {
        Trace {
            seed,
            ticks: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.ticks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ticks.is_empty()
    }

    pub fn last(&self) -> Option<&TickRecord> {
        self.ticks.last()
    }

    /// Canonical JSON text: lexicographic keys, no insignificant whitespace.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("traces always serialize")
    }

    pub fn from_json(text: &str) -> Result<Trace, TraceError> {
        let trace: Trace = serde_json::from_str(text).map_err(ParseError::from)?;
        for (i, record) in trace.ticks.iter().enumerate() {
            let expected = i as u64 + 1;
            if record.tick != expected {
                return Err(TraceError::NonContiguous {
                    expected,
                    found: record.tick,
                });
            }
        }
        Ok(trace)
    }
}

pub fn serialize_trace(trace: &Trace) -> String {
    trace.to_json()
}

pub fn deserialize_trace(text: &str) -> Result<Trace, TraceError> {
    Trace::from_json(text)
}
