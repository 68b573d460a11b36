//! Three agents share a room with one door: a porter who locks and unlocks
//! on request, a paranoid agent who wants it locked and a claustrophobe who
//! wants it open.

use crate::agent::{ActionRecord, Agent, BeliefMap, Fault, Plan};
use crate::environment::{Environment, StateUpdate};
use crate::rng::SeededRng;
use crate::value::{Value, ValueRecord};

fn action(key: &str, value: &str) -> ActionRecord {
    ValueRecord::new().with(key, value)
}

fn door_locked(beliefs: &BeliefMap) -> bool {
    beliefs["door"]["locked"].as_bool().unwrap_or(false)
}

fn requested(beliefs: &BeliefMap, what: &str) -> bool {
    beliefs["requests"]
        .as_list()
        .is_some_and(|r| r.iter().any(|v| *v == what))
}

/// Door locked, nobody has asked for anything yet.
pub fn initial_state() -> ValueRecord {
    ValueRecord::new()
        .with("door", ValueRecord::new().with("locked", true))
        .with("requests", Vec::<Value>::new())
}

pub fn porter() -> Agent {
    let plans = vec![
        Plan::on_beliefs(
            |b| !door_locked(b) && requested(b, "lock"),
            |_| vec![action("door", "lock")],
        ),
        Plan::on_beliefs(
            |b| door_locked(b) && requested(b, "unlock"),
            |_| vec![action("door", "unlock")],
        ),
    ];
    Agent::new("porter", initial_state(), [], plans).expect("static agent definition")
}

pub fn paranoid() -> Agent {
    let plans = vec![
        Plan::on_beliefs(|b| !door_locked(b), |_| vec![action("request", "lock")]),
        Plan::on_beliefs(door_locked, |_| {
            vec![action("announce", "Thanks for locking the door!")]
        }),
    ];
    Agent::new("paranoid", initial_state(), [], plans).expect("static agent definition")
}

pub fn claustrophobe() -> Agent {
    let plans = vec![
        Plan::on_beliefs(door_locked, |_| vec![action("request", "unlock")]),
        Plan::on_beliefs(
            |b| !door_locked(b),
            |_| vec![action("announce", "Thanks for unlocking the door!")],
        ),
    ];
    Agent::new("claustrophobe", initial_state(), [], plans).expect("static agent definition")
}

/// Applies door commands and requests; announcements only produce log lines.
pub fn update_state(
    actions: &[Vec<ActionRecord>],
    agent_id: &str,
    current: &ValueRecord,
    _rng: &mut SeededRng,
) -> Result<StateUpdate, Fault> {
    let mut requests: Vec<Value> = current["requests"].as_list().unwrap_or_default().to_vec();
    let mut door = None;
    let mut log = Vec::new();

    for plan_actions in actions {
        let any = |key: &str, value: &str| plan_actions.iter().any(|a| a[key] == value);
        if any("door", "lock") {
            door = Some(true);
            requests.clear();
            log.push(format!("{agent_id}: Lock door"));
        }
        if any("door", "unlock") {
            door = Some(false);
            requests.clear();
            log.push(format!("{agent_id}: Unlock door"));
        }
        if any("request", "lock") {
            requests.push("lock".into());
            log.push(format!("{agent_id}: Request: lock door"));
        }
        if any("request", "unlock") {
            requests.push("unlock".into());
            log.push(format!("{agent_id}: Request: unlock door"));
        }
        if let Some(text) = plan_actions.iter().find_map(|a| a["announce"].as_str()) {
            log.push(format!("{agent_id}: {text}"));
        }
    }

    let mut state = ValueRecord::new().with("requests", requests);
    if let Some(locked) = door {
        state.insert("door", ValueRecord::new().with("locked", locked));
    }
    Ok(StateUpdate { state, log })
}

/// The room with agents registered as paranoid, claustrophobe, porter.
pub fn build_room() -> Environment {
    Environment::new(
        vec![paranoid(), claustrophobe(), porter()],
        initial_state(),
        update_state,
    )
    .expect("static environment definition")
}
