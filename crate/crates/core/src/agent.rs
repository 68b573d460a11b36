//! Beliefs, desires, intentions, plans and the agent reasoning cycle.
//!
//! An agent's [`next`](Agent::next) cycle merges the perceived belief update,
//! recomputes intentions from scratch, then runs every plan whose head holds
//! in declaration order. A plan body's belief update is applied before the
//! next head is evaluated.

use std::collections::BTreeMap;
use std::error::Error;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::error::ValidationError;
use crate::value::{Value, ValueRecord};

/// An agent's world model: belief id to value.
pub type BeliefMap = ValueRecord;

/// A single action request, e.g. `{door: "lock"}`.
pub type ActionRecord = ValueRecord;

/// Failure raised by user-supplied desire, head or body code.
pub type Fault = Box<dyn Error + Send + Sync>;

/// Desires keyed by id; iteration is lexicographic.
pub type Desires = BTreeMap<String, Desire>;

type DesireBody = dyn Fn(&BeliefMap) -> Result<Value, Fault> + Send + Sync;
type PlanHead = dyn Fn(&BeliefMap, &[Intention]) -> Result<bool, Fault> + Send + Sync;
type PlanBody = dyn Fn(&BeliefMap) -> Result<PlanResult, Fault> + Send + Sync;

/// Builds the single-entry belief map `{id: value}`.
pub fn belief(id: &str, value: impl Into<Value>) -> Result<BeliefMap, ValidationError> {
    if id.is_empty() {
        return Err(ValidationError::EmptyId("belief id"));
    }
    let value = value.into();
    value.validate()?;
    Ok(ValueRecord::new().with(id, value))
}

#[derive(Clone)]
pub struct Desire {
    id: String,
    body: Arc<DesireBody>,
}

impl Desire {
    pub fn new<F>(id: &str, body: F) -> Result<Self, ValidationError>
    where
        F: Fn(&BeliefMap) -> Value + Send + Sync + 'static,
    {
        Self::fallible(id, move |b| Ok(body(b)))
    }

    pub fn fallible<F>(id: &str, body: F) -> Result<Self, ValidationError>
    where
        F: Fn(&BeliefMap) -> Result<Value, Fault> + Send + Sync + 'static,
    {
        if id.is_empty() {
            return Err(ValidationError::EmptyId("desire id"));
        }
        Ok(Desire {
            id: id.to_owned(),
            body: Arc::new(body),
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn evaluate(&self, beliefs: &BeliefMap) -> Result<Value, Fault> {
        (self.body)(beliefs)
    }
}

impl fmt::Debug for Desire {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Desire").field("id", &self.id).finish_non_exhaustive()
    }
}

/// A desire selected for the current cycle, with the value it evaluated to.
#[derive(Clone, Debug, PartialEq)]
pub struct Intention {
    pub id: String,
    pub value: Value,
}

/// What a plan body produces.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PlanResult {
    pub actions: Vec<ActionRecord>,
    pub belief_update: Option<BeliefMap>,
}

impl PlanResult {
    pub fn actions(actions: Vec<ActionRecord>) -> Self {
        PlanResult {
            actions,
            belief_update: None,
        }
    }

    pub fn with_beliefs(mut self, update: BeliefMap) -> Self {
        self.belief_update = Some(update);
        self
    }
}

impl From<Vec<ActionRecord>> for PlanResult {
    fn from(actions: Vec<ActionRecord>) -> Self {
        PlanResult::actions(actions)
    }
}

#[derive(Clone)]
pub struct Plan {
    head: Arc<PlanHead>,
    body: Arc<PlanBody>,
}

impl Plan {
    /// A plan whose head sees both beliefs and the current intentions.
    pub fn new<H, B, R>(head: H, body: B) -> Self
    where
        H: Fn(&BeliefMap, &[Intention]) -> bool + Send + Sync + 'static,
        B: Fn(&BeliefMap) -> R + Send + Sync + 'static,
        R: Into<PlanResult>,
    {
        Plan::fallible(move |b, i| Ok(head(b, i)), move |b| Ok(body(b).into()))
    }

    /// A belief-plan rule: the head only looks at beliefs.
    pub fn on_beliefs<H, B, R>(head: H, body: B) -> Self
    where
        H: Fn(&BeliefMap) -> bool + Send + Sync + 'static,
        B: Fn(&BeliefMap) -> R + Send + Sync + 'static,
        R: Into<PlanResult>,
    {
        Plan::new(move |b, _| head(b), body)
    }

    /// A plan whose head is active while the intention `id` is present.
    pub fn on_intention<B, R>(id: &str, body: B) -> Self
    where
        B: Fn(&BeliefMap) -> R + Send + Sync + 'static,
        R: Into<PlanResult>,
    {
        let id = id.to_owned();
        Plan::new(move |_, intentions| intentions.iter().any(|i| i.id == id), body)
    }

    pub fn fallible<H, B>(head: H, body: B) -> Self
    where
        H: Fn(&BeliefMap, &[Intention]) -> Result<bool, Fault> + Send + Sync + 'static,
        B: Fn(&BeliefMap) -> Result<PlanResult, Fault> + Send + Sync + 'static,
    {
        Plan {
            head: Arc::new(head),
            body: Arc::new(body),
        }
    }

    pub fn is_active(&self, beliefs: &BeliefMap, intentions: &[Intention]) -> Result<bool, Fault> {
        (self.head)(beliefs, intentions)
    }

    pub fn execute(&self, beliefs: &BeliefMap) -> Result<PlanResult, Fault> {
        (self.body)(beliefs)
    }
}

impl fmt::Debug for Plan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Plan { .. }")
    }
}

/// The desire-to-intention filter a [`PreferenceGenerator`] produces for one
/// cycle. `Some(value)` promotes the desire to an intention.
pub type PreferenceFn<'a> = Box<dyn Fn(&Desire) -> Result<Option<Value>, Fault> + 'a>;

type GeneratorFn = dyn for<'a> Fn(&'a BeliefMap, &'a Desires) -> PreferenceFn<'a> + Send + Sync;

/// Higher-order constructor of the per-cycle preference function.
#[derive(Clone)]
pub struct PreferenceGenerator(Arc<GeneratorFn>);

impl PreferenceGenerator {
    pub fn new<G>(generator: G) -> Self
    where
        G: for<'a> Fn(&'a BeliefMap, &'a Desires) -> PreferenceFn<'a> + Send + Sync + 'static,
    {
        PreferenceGenerator(Arc::new(generator))
    }

    /// Reduces `desires` to intentions, in lexicographic desire order.
    pub fn intentions(&self, beliefs: &BeliefMap, desires: &Desires) -> Result<Vec<Intention>, DesireFault> {
        let preference = (self.0)(beliefs, desires);
        let mut intentions = Vec::new();
        for desire in desires.values() {
            let selected = preference(desire).map_err(|source| DesireFault {
                desire: desire.id.clone(),
                source,
            })?;
            if let Some(value) = selected {
                intentions.push(Intention {
                    id: desire.id.clone(),
                    value,
                });
            }
        }
        Ok(intentions)
    }
}

impl Default for PreferenceGenerator {
    /// Turns every desire into an intention carrying the desire's value.
    fn default() -> Self {
        PreferenceGenerator::new(|beliefs, _desires| Box::new(move |desire| desire.evaluate(beliefs).map(Some)))
    }
}

impl fmt::Debug for PreferenceGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PreferenceGenerator { .. }")
    }
}

pub fn default_preference_generator() -> PreferenceGenerator {
    PreferenceGenerator::default()
}

#[derive(Debug, Error)]
#[error("desire `{desire}` failed: {source}")]
pub struct DesireFault {
    pub desire: String,
    #[source]
    pub source: Fault,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReasoningMode {
    /// Plan heads see beliefs only; intentions are always empty.
    BeliefPlan,
    /// Every desire is an intention; the preference generator is bypassed.
    BeliefDesirePlan,
    /// Intentions come from the agent's preference generator.
    BeliefDesireIntentionPlan,
}

/// Where in the reasoning cycle a fault happened.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FaultStage {
    Desire(String),
    PlanHead(usize),
    PlanBody(usize),
}

impl fmt::Display for FaultStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FaultStage::Desire(id) => write!(f, "desire `{id}`"),
            FaultStage::PlanHead(i) => write!(f, "head of plan {i}"),
            FaultStage::PlanBody(i) => write!(f, "body of plan {i}"),
        }
    }
}

#[derive(Debug, Error)]
#[error("agent `{agent}` failed in {stage}: {source}")]
pub struct AgentFault {
    pub agent: String,
    pub stage: FaultStage,
    #[source]
    pub source: Fault,
}

#[derive(Clone, Debug)]
pub struct Agent {
    id: String,
    beliefs: BeliefMap,
    desires: Desires,
    plans: Vec<Plan>,
    preference: PreferenceGenerator,
    mode: ReasoningMode,
    intentions: Vec<Intention>,
}

impl Agent {
    /// Creates an agent. The mode is belief-plan when `desires` is empty and
    /// full BDI otherwise; use [`with_mode`](Self::with_mode) to pick
    /// belief-desire-plan.
    pub fn new(
        id: &str,
        beliefs: BeliefMap,
        desires: impl IntoIterator<Item = Desire>,
        plans: Vec<Plan>,
    ) -> Result<Self, ValidationError> {
        if id.is_empty() {
            return Err(ValidationError::EmptyId("agent id"));
        }
        beliefs.validate()?;
        let mut map = Desires::new();
        for desire in desires {
            let key = desire.id.clone();
            if map.insert(key.clone(), desire).is_some() {
                return Err(ValidationError::DuplicateKey {
                    path: format!("desires.{key}"),
                });
            }
        }
        let mode = if map.is_empty() {
            ReasoningMode::BeliefPlan
        } else {
            ReasoningMode::BeliefDesireIntentionPlan
        };
        Ok(Agent {
            id: id.to_owned(),
            beliefs,
            desires: map,
            plans,
            preference: PreferenceGenerator::default(),
            mode,
            intentions: Vec::new(),
        })
    }

    pub fn with_preference(mut self, generator: PreferenceGenerator) -> Self {
        self.preference = generator;
        self
    }

    pub fn with_mode(mut self, mode: ReasoningMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn beliefs(&self) -> &BeliefMap {
        &self.beliefs
    }

    pub fn desires(&self) -> &Desires {
        &self.desires
    }

    pub fn plans(&self) -> &[Plan] {
        &self.plans
    }

    pub fn mode(&self) -> ReasoningMode {
        self.mode
    }

    /// Intentions computed by the most recent cycle.
    pub fn intentions(&self) -> &[Intention] {
        &self.intentions
    }

    fn fault(&self, stage: FaultStage, source: Fault) -> AgentFault {
        AgentFault {
            agent: self.id.clone(),
            stage,
            source,
        }
    }

    fn deliberate(&self) -> Result<Vec<Intention>, AgentFault> {
        let result = match self.mode {
            ReasoningMode::BeliefPlan => Ok(Vec::new()),
            ReasoningMode::BeliefDesirePlan => self
                .desires
                .values()
                .map(|d| {
                    d.evaluate(&self.beliefs)
                        .map(|value| Intention {
                            id: d.id.clone(),
                            value,
                        })
                        .map_err(|source| DesireFault {
                            desire: d.id.clone(),
                            source,
                        })
                })
                .collect(),
            ReasoningMode::BeliefDesireIntentionPlan => self.preference.intentions(&self.beliefs, &self.desires),
        };
        result.map_err(|f| self.fault(FaultStage::Desire(f.desire), f.source))
    }

    /// Runs one reasoning cycle and returns the action lists of the plans
    /// that fired, in plan order.
    pub fn next(&mut self, belief_update: &ValueRecord) -> Result<Vec<Vec<ActionRecord>>, AgentFault> {
        self.beliefs.merge(belief_update);
        self.intentions = self.deliberate()?;

        let mut fired = Vec::new();
        for (index, plan) in self.plans.iter().enumerate() {
            let active = plan
                .is_active(&self.beliefs, &self.intentions)
                .map_err(|e| self.fault(FaultStage::PlanHead(index), e))?;
            if !active {
                continue;
            }
            let result = plan
                .execute(&self.beliefs)
                .map_err(|e| self.fault(FaultStage::PlanBody(index), e))?;
            check_plan_result(&result).map_err(|e| self.fault(FaultStage::PlanBody(index), e.into()))?;
            if let Some(update) = result.belief_update {
                self.beliefs.merge_owned(update);
            }
            fired.push(result.actions);
        }
        Ok(fired)
    }
}

fn check_plan_result(result: &PlanResult) -> Result<(), ValidationError> {
    for (i, action) in result.actions.iter().enumerate() {
        if action.is_empty() {
            return Err(ValidationError::Config(format!("action {i} is an empty record")));
        }
        action.validate()?;
    }
    if let Some(update) = &result.belief_update {
        update.validate()?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn action(key: &str, value: impl Into<Value>) -> ActionRecord {
        ValueRecord::new().with(key, value)
    }

    fn door(locked: bool) -> Value {
        ValueRecord::new().with("locked", locked).into()
    }

    fn room_beliefs(locked: bool, requests: Vec<&str>) -> BeliefMap {
        ValueRecord::new().with("door", door(locked)).with("requests", requests)
    }

    fn requested(b: &BeliefMap, what: &str) -> bool {
        b["requests"].as_list().is_some_and(|l| l.iter().any(|r| *r == what))
    }

    fn porter() -> Agent {
        let plans = vec![
            Plan::on_beliefs(
                |b| !b["door"]["locked"].as_bool().unwrap_or(false) && requested(b, "lock"),
                |_| vec![action("door", "lock")],
            ),
            Plan::on_beliefs(
                |b| b["door"]["locked"] == true && requested(b, "unlock"),
                |_| vec![action("door", "unlock")],
            ),
        ];
        Agent::new("porter", room_beliefs(true, vec![]), [], plans).unwrap()
    }

    fn paranoid() -> Agent {
        let plans = vec![
            Plan::on_beliefs(|b| b["door"]["locked"] != true, |_| vec![action("request", "lock")]),
            Plan::on_beliefs(
                |b| b["door"]["locked"] == true,
                |_| vec![action("announce", "Thanks for locking the door!")],
            ),
        ];
        Agent::new("paranoid", room_beliefs(true, vec![]), [], plans).unwrap()
    }

    #[test]
    fn belief_builds_single_entry_maps() {
        assert_eq!(
            belief("door", door(true)).unwrap(),
            ValueRecord::new().with("door", door(true))
        );
        assert_eq!(
            belief("requests", Vec::<Value>::new()).unwrap()["requests"],
            Value::List(vec![])
        );
        assert_eq!(belief("", 1), Err(ValidationError::EmptyId("belief id")));
    }

    #[test]
    fn desire_evaluates_against_beliefs() {
        let d = Desire::new("stayLocked", |b| b["door"]["locked"].clone()).unwrap();
        assert_eq!(d.evaluate(&room_beliefs(true, vec![])).unwrap(), Value::Bool(true));
        let always = Desire::new("always", |_| true.into()).unwrap();
        assert_eq!(always.evaluate(&BeliefMap::new()).unwrap(), Value::Bool(true));
        assert!(Desire::new("", |_| Value::Null).is_err());
    }

    #[test]
    fn constant_false_head_never_fires() {
        let plan = Plan::on_beliefs(|_| false, |_| vec![action("x", 1)]);
        let mut agent = Agent::new("a", BeliefMap::new(), [], vec![plan]).unwrap();
        for _ in 0..3 {
            assert!(agent.next(&BeliefMap::new()).unwrap().is_empty());
        }
    }

    #[test]
    fn mode_is_inferred_from_desires() {
        assert_eq!(porter().mode(), ReasoningMode::BeliefPlan);
        let d = Desire::new("d", |_| true.into()).unwrap();
        let mut bdi = Agent::new("a", BeliefMap::new(), [d], vec![]).unwrap();
        assert_eq!(bdi.mode(), ReasoningMode::BeliefDesireIntentionPlan);
        assert!(bdi.next(&BeliefMap::new()).unwrap().is_empty());
        assert!(Agent::new("", BeliefMap::new(), [], vec![]).is_err());
    }

    #[test]
    fn duplicate_desire_ids_are_rejected() {
        let a = Desire::new("d", |_| Value::Null).unwrap();
        let b = Desire::new("d", |_| Value::Null).unwrap();
        assert!(Agent::new("x", BeliefMap::new(), [a, b], vec![]).is_err());
    }

    #[test]
    fn default_preference_orders_intentions_by_id() {
        let gen = default_preference_generator();
        let beliefs = ValueRecord::new().with("x", 5);
        assert!(gen.intentions(&beliefs, &Desires::new()).unwrap().is_empty());

        let mut desires = Desires::new();
        for id in ["d2", "d1"] {
            desires.insert(id.into(), Desire::new(id, |b| b["x"].clone()).unwrap());
        }
        let intentions = gen.intentions(&beliefs, &desires).unwrap();
        let ids: Vec<_> = intentions.iter().map(|i| i.id.as_str()).collect();
        assert_eq!(ids, ["d1", "d2"]);
        assert_eq!(intentions[0].value.as_i64(), Some(5));
    }

    #[test]
    fn paranoid_thanks_when_door_locked() {
        let mut agent = paranoid();
        let out = agent.next(&room_beliefs(true, vec![])).unwrap();
        assert_eq!(out, vec![vec![action("announce", "Thanks for locking the door!")]]);
    }

    #[test]
    fn porter_unlocks_on_request() {
        let mut agent = porter();
        let out = agent.next(&room_beliefs(true, vec!["unlock"])).unwrap();
        assert_eq!(out, vec![vec![action("door", "unlock")]]);
    }

    #[test]
    fn porter_idles_without_requests() {
        let mut agent = porter();
        assert!(agent.next(&room_beliefs(true, vec![])).unwrap().is_empty());
    }

    #[test]
    fn later_heads_see_earlier_belief_updates() {
        let plans = vec![
            Plan::on_beliefs(
                |b| b["step"].as_i64() == Some(0),
                |_| PlanResult::actions(vec![action("did", "first")]).with_beliefs(ValueRecord::new().with("step", 1)),
            ),
            Plan::on_beliefs(|b| b["step"].as_i64() == Some(1), |_| vec![action("did", "second")]),
        ];
        let mut agent = Agent::new("seq", ValueRecord::new().with("step", 0), [], plans).unwrap();
        let out = agent.next(&BeliefMap::new()).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(agent.beliefs()["step"].as_i64(), Some(1));
    }

    #[test]
    fn intentions_follow_beliefs_every_cycle() {
        let desire = Desire::new("open", |b| b["want"].clone()).unwrap();
        let only_true = PreferenceGenerator::new(|beliefs, _| {
            Box::new(move |d| {
                let v = d.evaluate(beliefs)?;
                Ok((v == true).then_some(v))
            })
        });
        let plan = Plan::on_intention("open", |_| vec![action("door", "unlock")]);
        let mut agent = Agent::new("bdi", ValueRecord::new().with("want", false), [desire], vec![plan])
            .unwrap()
            .with_preference(only_true);

        assert!(agent.next(&BeliefMap::new()).unwrap().is_empty());
        assert!(agent.intentions().is_empty());
        let set = |w: bool| ValueRecord::new().with("want", w);
        assert_eq!(agent.next(&set(true)).unwrap().len(), 1);
        assert_eq!(agent.intentions()[0].id, "open");
        assert!(agent.next(&set(false)).unwrap().is_empty());
        assert!(agent.intentions().is_empty());
    }

    #[test]
    fn belief_desire_plan_mode_ignores_preference() {
        let desire = Desire::new("d", |_| false.into()).unwrap();
        let nothing = PreferenceGenerator::new(|_, _| Box::new(|_| Ok(None)));
        let plan = Plan::on_intention("d", |_| vec![action("x", 1)]);
        let mut agent = Agent::new("a", BeliefMap::new(), [desire], vec![plan])
            .unwrap()
            .with_preference(nothing)
            .with_mode(ReasoningMode::BeliefDesirePlan);
        assert_eq!(agent.next(&BeliefMap::new()).unwrap().len(), 1);
    }

    #[test]
    fn belief_plan_heads_receive_no_intentions() {
        let desire = Desire::new("d", |_| true.into()).unwrap();
        let plan = Plan::new(|_, intentions| intentions.is_empty(), |_| vec![action("x", 1)]);
        let mut agent = Agent::new("a", BeliefMap::new(), [desire], vec![plan])
            .unwrap()
            .with_mode(ReasoningMode::BeliefPlan);
        assert_eq!(agent.next(&BeliefMap::new()).unwrap().len(), 1);
    }

    #[test]
    fn faults_are_tagged_with_agent_and_stage() {
        let plans = vec![
            Plan::on_beliefs(|_| true, |_| vec![action("ok", true)]),
            Plan::fallible(|_, _| Ok(true), |_| Err("boom".into())),
        ];
        let mut agent = Agent::new("x", BeliefMap::new(), [], plans).unwrap();
        let fault = agent.next(&BeliefMap::new()).unwrap_err();
        assert_eq!(fault.agent, "x");
        assert_eq!(fault.stage, FaultStage::PlanBody(1));
        assert_eq!(fault.to_string(), "agent `x` failed in body of plan 1: boom");

        let d = Desire::fallible("bad", |_| Err("nope".into())).unwrap();
        let mut agent = Agent::new("y", BeliefMap::new(), [d], vec![]).unwrap();
        let fault = agent.next(&BeliefMap::new()).unwrap_err();
        assert_eq!(fault.stage, FaultStage::Desire("bad".into()));
    }

    #[test]
    fn empty_action_records_are_faults() {
        let plan = Plan::on_beliefs(|_| true, |_| vec![ActionRecord::new()]);
        let mut agent = Agent::new("x", BeliefMap::new(), [], vec![plan]).unwrap();
        assert_eq!(
            agent.next(&BeliefMap::new()).unwrap_err().stage,
            FaultStage::PlanBody(0)
        );
    }
}
