use agentloop::scenarios::OpinionTick;
use agentloop::Number;
use serde::{Deserialize, Serialize};

/// Per-tick opinion counts for one run. Shared by `run --format json` and
/// the `simulate` endpoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SimulationReport {
    // lexicographic field order keeps the derived output canonical
    pub bias: Number,
    pub per_tick: Vec<OpinionTick>,
    pub seed: u64,
    pub ticks: u64,
}

impl SimulationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports always serialize")
    }
}
