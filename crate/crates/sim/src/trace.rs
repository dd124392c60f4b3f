//! Line-delimited JSON episode traces: one header line, then one line per step.

use gridsim_core::{Action, ActionCode, ItemId, MaxSteps, StepEvent, TerminationCause, PRNG_NAME};
use serde::{Deserialize, Serialize};

use crate::env::EnvStep;

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub scenario_digest: String,
    pub seed: u64,
    /// `None` for unlimited.
    pub max_steps: Option<u64>,
    pub engine_version: String,
    pub prng: String,
    pub action_order: Vec<u32>,
}

impl TraceHeader {
    pub fn new(scenario_digest: String, seed: u64, max_steps: MaxSteps, action_order: &[ItemId]) -> Self {
        Self {
            scenario_digest,
            seed,
            max_steps: match max_steps {
                MaxSteps::Limited(n) => Some(n),
                MaxSteps::Unlimited => None,
            },
            engine_version: ENGINE_VERSION.to_string(),
            prng: PRNG_NAME.to_string(),
            action_order: action_order.iter().map(|id| id.0).collect(),
        }
    }

    pub fn max_steps(&self) -> MaxSteps {
        self.max_steps.map_or(MaxSteps::Unlimited, MaxSteps::Limited)
    }
}

/// An action code on the wire: `8` or `[look, move]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WireAction {
    Code(u8),
    Pair([u8; 2]),
}

impl From<ActionCode> for WireAction {
    fn from(c: ActionCode) -> Self {
        match c {
            ActionCode::Primitive(c) => WireAction::Code(c),
            ActionCode::Pair(l, m) => WireAction::Pair([l, m]),
        }
    }
}

impl From<WireAction> for ActionCode {
    fn from(w: WireAction) -> Self {
        match w {
            WireAction::Code(c) => ActionCode::Primitive(c),
            WireAction::Pair([l, m]) => ActionCode::Pair(l, m),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventRecord {
    Collision { mover: u32, occupant: u32, mover_power: i32, occupant_power: i32 },
    FoodConsumed { agent: u32, food: u32 },
    TimeStep { agent: u32 },
    BlockedByObstacle { agent: u32 },
}

impl From<&StepEvent> for EventRecord {
    fn from(e: &StepEvent) -> Self {
        match *e {
            StepEvent::Collision { mover, occupant, mover_power, occupant_power } => {
                EventRecord::Collision { mover: mover.0, occupant: occupant.0, mover_power, occupant_power }
            }
            StepEvent::FoodConsumed { agent, food } => EventRecord::FoodConsumed { agent: agent.0, food: food.0 },
            StepEvent::TimeStep { agent } => EventRecord::TimeStep { agent: agent.0 },
            StepEvent::BlockedByObstacle { agent } => EventRecord::BlockedByObstacle { agent: agent.0 },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CauseRecord {
    None,
    MaxSteps,
    AllFoodConsumed,
}

impl From<TerminationCause> for CauseRecord {
    fn from(c: TerminationCause) -> Self {
        match c {
            TerminationCause::None => CauseRecord::None,
            TerminationCause::MaxSteps => CauseRecord::MaxSteps,
            TerminationCause::AllFoodConsumed => CauseRecord::AllFoodConsumed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentAction {
    pub agent: u32,
    pub action: WireAction,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentReward {
    pub agent: u32,
    pub reward: f64,
}

/// A flattened observation; see [`crate::env::manifest`] for its layout.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentObservation {
    pub agent: u32,
    pub data: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// 1-based step number.
    pub step: u64,
    pub actions: Vec<AgentAction>,
    pub events: Vec<EventRecord>,
    pub rewards: Vec<AgentReward>,
    pub terminated: bool,
    pub cause: CauseRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observations: Option<Vec<AgentObservation>>,
}

impl StepRecord {
    pub fn from_step(step: u64, s: &EnvStep, with_observations: bool) -> Self {
        Self {
            step,
            actions: s.actions.iter().map(|&(id, a)| AgentAction { agent: id.0, action: a.code().into() }).collect(),
            events: s.events.iter().map(EventRecord::from).collect(),
            rewards: s.rewards.iter().map(|&(id, r)| AgentReward { agent: id.0, reward: r }).collect(),
            terminated: s.status.terminated,
            cause: s.status.cause.into(),
            observations: with_observations.then(|| {
                s.observations.iter().map(|(id, o)| AgentObservation { agent: id.0, data: o.flatten() }).collect()
            }),
        }
    }

    pub fn actions(&self) -> Vec<(ItemId, ActionCode)> {
        self.actions.iter().map(|a| (ItemId(a.agent), a.action.into())).collect()
    }

    pub fn decoded_actions(&self) -> Result<Vec<(ItemId, Action)>, gridsim_core::ActionCodeError> {
        self.actions.iter().map(|a| Ok((ItemId(a.agent), Action::decode(a.action.into())?))).collect()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum Line {
    Header(TraceHeader),
    Step(StepRecord),
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeTrace {
    pub header: TraceHeader,
    pub steps: Vec<StepRecord>,
}

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("trace has no header line")]
    MissingHeader,
    #[error("line {0}: a trace holds exactly one header, first")]
    MisplacedHeader(usize),
}

impl EpisodeTrace {
    pub fn cause(&self) -> CauseRecord {
        self.steps.last().map_or(CauseRecord::None, |s| s.cause)
    }

    pub fn total_reward(&self, agent: u32) -> f64 {
        self.steps.iter().flat_map(|s| &s.rewards).filter(|r| r.agent == agent).map(|r| r.reward).sum()
    }

    pub fn count_events(&self, pred: impl Fn(&EventRecord) -> bool) -> usize {
        self.steps.iter().flat_map(|s| &s.events).filter(|e| pred(e)).count()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = serde_json::to_string(&Line::Header(self.header.clone())).expect("serialises");
        out.push('\n');
        for s in &self.steps {
            out.push_str(&serde_json::to_string(&Line::Step(s.clone())).expect("serialises"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, TraceError> {
        let mut header = None;
        let mut steps = Vec::new();
        for (i, raw) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let line = serde_json::from_str(raw).map_err(|source| TraceError::Json { line: i + 1, source })?;
            match line {
                Line::Header(h) if header.is_none() && steps.is_empty() => header = Some(h),
                Line::Header(_) => return Err(TraceError::MisplacedHeader(i + 1)),
                Line::Step(s) if header.is_some() => steps.push(s),
                Line::Step(_) => return Err(TraceError::MissingHeader),
            }
        }
        Ok(Self { header: header.ok_or(TraceError::MissingHeader)?, steps })
    }
}
