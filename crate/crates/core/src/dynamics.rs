//! Actions, step execution, events and rewards.
//!
//! A step applies each agent's action in action order against the state left
//! by the agents before it, then appends one `TimeStep` event per agent (also
//! in action order), bumps the step counter, prices every event, checks for
//! termination and recomputes all observations.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::error::{ConfigError, Error, StateError};
use crate::grid::Orientation;
use crate::vision::{self, FovScratch, Observation, VisibilityMask};
use crate::world::{Cell, ItemId, TerminationStatus, World};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Action {
    Look(Orientation),
    Move(Orientation),
    NoOp,
    /// Look, then move, within one step.
    Composite { look: Orientation, step: Orientation },
}

/// Wire form of an action: a primitive code `0..=8` or a `(look, move)` pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ActionCode {
    Primitive(u8),
    Pair(u8, u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ActionCodeError {
    #[error("action code {0} out of range 0..=8")]
    OutOfRange(u8),
    #[error("composite needs a look code (0..=3) then a move code (4..=7), got ({0}, {1})")]
    BadPair(u8, u8),
}

impl Action {
    /// The nine primitives in wire-code order: look N/S/E/W, move N/S/E/W, no-op.
    pub const PRIMITIVES: [Action; 9] = [
        Action::Look(Orientation::North),
        Action::Look(Orientation::South),
        Action::Look(Orientation::East),
        Action::Look(Orientation::West),
        Action::Move(Orientation::North),
        Action::Move(Orientation::South),
        Action::Move(Orientation::East),
        Action::Move(Orientation::West),
        Action::NoOp,
    ];

    pub const NOOP_CODE: u8 = 8;

    pub fn from_code(code: u8) -> Result<Self, ActionCodeError> {
        Self::PRIMITIVES.get(code as usize).copied().ok_or(ActionCodeError::OutOfRange(code))
    }

    pub fn from_pair(look: u8, step: u8) -> Result<Self, ActionCodeError> {
        match (Self::from_code(look), Self::from_code(step)) {
            (Ok(Action::Look(l)), Ok(Action::Move(m))) => Ok(Action::Composite { look: l, step: m }),
            _ => Err(ActionCodeError::BadPair(look, step)),
        }
    }

    pub fn decode(code: ActionCode) -> Result<Self, ActionCodeError> {
        match code {
            ActionCode::Primitive(c) => Self::from_code(c),
            ActionCode::Pair(l, m) => Self::from_pair(l, m),
        }
    }

    pub fn code(self) -> ActionCode {
        match self {
            Action::Look(d) => ActionCode::Primitive(d as u8),
            Action::Move(d) => ActionCode::Primitive(4 + d as u8),
            Action::NoOp => ActionCode::Primitive(Self::NOOP_CODE),
            Action::Composite { look, step } => ActionCode::Pair(look as u8, 4 + step as u8),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StepEvent {
    /// `mover` tried to enter the cell held by `occupant`; neither moved.
    Collision { mover: ItemId, occupant: ItemId, mover_power: i32, occupant_power: i32 },
    FoodConsumed { agent: ItemId, food: ItemId },
    TimeStep { agent: ItemId },
    /// Move into an obstacle or off the board; the agent stayed put.
    BlockedByObstacle { agent: ItemId },
}

impl StepEvent {
    /// Participants charged by the default scheme.
    pub fn involves(&self, id: ItemId) -> bool {
        match *self {
            StepEvent::Collision { mover, occupant, .. } => mover == id || occupant == id,
            StepEvent::FoodConsumed { agent, .. }
            | StepEvent::TimeStep { agent }
            | StepEvent::BlockedByObstacle { agent } => agent == id,
        }
    }
}

/// User-supplied pricing of events. Called once per (event, agent) pair for
/// every agent, so rewards may go to agents that did not take part in the event.
pub trait RewardHook: Send + Sync {
    fn reward(&self, scheme: &RewardScheme, event: &StepEvent, recipient: ItemId) -> f64;
}

#[derive(Clone)]
pub struct RewardScheme {
    pub collision: f64,
    pub food: f64,
    pub time_step: f64,
    pub hook: Option<Arc<dyn RewardHook>>,
}

impl Default for RewardScheme {
    fn default() -> Self {
        Self { collision: -10.0, food: 10.0, time_step: -0.1, hook: None }
    }
}

impl fmt::Debug for RewardScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RewardScheme")
            .field("collision", &self.collision)
            .field("food", &self.food)
            .field("time_step", &self.time_step)
            .field("hook", &self.hook.as_ref().map(|_| ".."))
            .finish()
    }
}

impl RewardScheme {
    pub fn new(collision: f64, food: f64, time_step: f64) -> Self {
        Self { collision, food, time_step, hook: None }
    }

    pub fn with_hook(mut self, hook: Arc<dyn RewardHook>) -> Self {
        self.hook = Some(hook);
        self
    }

    /// Built-in pricing. Collisions charge the strictly weaker participant,
    /// or both on equal power. Blocked moves cost nothing.
    pub fn default_reward(&self, event: &StepEvent, recipient: ItemId) -> f64 {
        match *event {
            StepEvent::Collision { mover, occupant, mover_power, occupant_power } => {
                let charged = if mover_power < occupant_power {
                    recipient == mover
                } else if mover_power > occupant_power {
                    recipient == occupant
                } else {
                    recipient == mover || recipient == occupant
                };
                if charged { self.collision } else { 0.0 }
            }
            StepEvent::FoodConsumed { agent, .. } if agent == recipient => self.food,
            StepEvent::TimeStep { agent } if agent == recipient => self.time_step,
            _ => 0.0,
        }
    }

    pub fn reward(&self, event: &StepEvent, recipient: ItemId) -> f64 {
        match &self.hook {
            Some(h) => h.reward(self, event, recipient),
            None => self.default_reward(event, recipient),
        }
    }

    /// Sum of `recipient`'s rewards over `events`, accumulated in event order.
    pub fn total(&self, events: &[StepEvent], recipient: ItemId) -> f64 {
        let mut r = 0.0;
        for e in events {
            if self.hook.is_some() || e.involves(recipient) {
                r += self.reward(e, recipient);
            }
        }
        r
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepResult {
    /// One entry per agent, in action order.
    pub rewards: Vec<(ItemId, f64)>,
    pub events: Vec<StepEvent>,
    /// One entry per agent in action order, each in the agent's configured frame.
    pub observations: Vec<(ItemId, Observation)>,
    pub terminated: TerminationStatus,
}

impl StepResult {
    pub fn reward(&self, agent: ItemId) -> Option<f64> {
        self.rewards.iter().find(|(id, _)| *id == agent).map(|&(_, r)| r)
    }

    pub fn observation(&self, agent: ItemId) -> Option<&Observation> {
        self.observations.iter().find(|(id, _)| *id == agent).map(|(_, o)| o)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    Dynamics,
    Vision,
    Observation,
}

/// Hook for timing the phases of a step; the core has no clock of its own.
pub trait PhaseProbe {
    fn enter(&mut self, phase: Phase);
    fn exit(&mut self, phase: Phase);
}

impl PhaseProbe for () {
    fn enter(&mut self, _: Phase) {}
    fn exit(&mut self, _: Phase) {}
}

impl World {
    /// Applies one agent's action to the state, outside a full step.
    /// Does not advance the step counter or emit a `TimeStep`.
    pub fn apply_action(&mut self, agent: ItemId, action: Action) -> Result<Vec<StepEvent>, Error> {
        let slot = self.placed_agent_slot(agent)?;
        if self.status.terminated {
            return Err(StateError::Terminated.into());
        }
        let mut events = Vec::new();
        self.apply_slot(slot, action, &mut events);
        Ok(events)
    }

    fn apply_slot(&mut self, slot: usize, action: Action, events: &mut Vec<StepEvent>) {
        match action {
            Action::NoOp => {}
            Action::Look(d) => self.agents[slot].orientation = d,
            Action::Move(d) => self.move_slot(slot, d, events),
            Action::Composite { look, step } => {
                self.agents[slot].orientation = look;
                self.move_slot(slot, step, events);
            }
        }
    }

    fn move_slot(&mut self, slot: usize, dir: Orientation, events: &mut Vec<StepEvent>) {
        let me = self.agents[slot].id;
        let from = self.agents[slot].position;
        let Some(to) = from.step(dir, self.size()) else {
            events.push(StepEvent::BlockedByObstacle { agent: me });
            return;
        };
        match *self.cells.get(to) {
            Cell::Obstacle(_) => events.push(StepEvent::BlockedByObstacle { agent: me }),
            Cell::Agent(other) => {
                let other = &self.agents[other as usize];
                events.push(StepEvent::Collision {
                    mover: me,
                    occupant: other.id,
                    mover_power: self.agents[slot].power,
                    occupant_power: other.power,
                });
            }
            Cell::Food(f) => {
                let food = &mut self.foods[f as usize];
                food.consumed = true;
                events.push(StepEvent::FoodConsumed { agent: me, food: food.id });
                self.relocate(slot, from, to);
            }
            Cell::Empty => self.relocate(slot, from, to),
        }
    }

    fn relocate(&mut self, slot: usize, from: crate::GridPosition, to: crate::GridPosition) {
        self.cells.set(from, Cell::Empty);
        self.cells.set(to, Cell::Agent(slot as u32));
        self.agents[slot].position = to;
    }

    /// Advances the episode by one step. Agents missing from `actions` no-op;
    /// if an agent appears more than once its last entry wins.
    pub fn step(&mut self, actions: &[(ItemId, Action)]) -> Result<StepResult, Error> {
        self.step_probed(actions, &mut ())
    }

    pub fn step_probed<P: PhaseProbe>(&mut self, actions: &[(ItemId, Action)], probe: &mut P) -> Result<StepResult, Error> {
        if !self.is_generated() {
            return Err(StateError::NotGenerated.into());
        }
        if self.status.terminated {
            return Err(StateError::Terminated.into());
        }
        let mut per_slot = vec![Action::NoOp; self.agents.len()];
        for &(id, action) in actions {
            let slot = self.agent_slot(id).ok_or(ConfigError::UnknownAgent(id))?;
            per_slot[slot] = action;
        }

        probe.enter(Phase::Dynamics);
        let mut events = Vec::with_capacity(2 * self.agents.len());
        for i in 0..self.order.len() {
            let slot = self.order[i];
            self.apply_slot(slot, per_slot[slot], &mut events);
        }
        for &slot in &self.order {
            events.push(StepEvent::TimeStep { agent: self.agents[slot].id });
        }
        self.step_count += 1;
        let scheme = &self.config.reward_scheme;
        let rewards = self
            .order
            .iter()
            .map(|&slot| {
                let id = self.agents[slot].id;
                (id, scheme.total(&events, id))
            })
            .collect();
        self.status = self.check_termination();
        probe.exit(Phase::Dynamics);

        let observations = self.observe_all(probe);
        Ok(StepResult { rewards, events, observations, terminated: self.status })
    }

    /// Every agent's observation in action order, in its configured frame.
    pub fn observations(&self) -> Result<Vec<(ItemId, Observation)>, StateError> {
        if !self.is_generated() {
            return Err(StateError::NotGenerated);
        }
        Ok(self.observe_all(&mut ()))
    }

    fn observe_all<P: PhaseProbe>(&self, probe: &mut P) -> Vec<(ItemId, Observation)> {
        let n = self.size();
        probe.enter(Phase::Vision);
        let mut opaque = vec![false; n * n];
        self.fill_opacity(&mut opaque);
        let mut scratch = FovScratch::default();
        let masks: Vec<VisibilityMask> = self
            .order
            .iter()
            .map(|&slot| {
                let body = &self.agents[slot];
                let mut mask = VisibilityMask::empty(n);
                vision::field_of_view_into(
                    &opaque,
                    n,
                    body.position,
                    body.orientation,
                    &body.vision,
                    &mut scratch,
                    &mut mask,
                );
                mask
            })
            .collect();
        probe.exit(Phase::Vision);

        probe.enter(Phase::Observation);
        let out = self
            .order
            .iter()
            .zip(&masks)
            .map(|(&slot, mask)| {
                let body = &self.agents[slot];
                let obs = vision::build(self, body.id, mask, body.vision.mode).expect("placed agent");
                (body.id, obs)
            })
            .collect();
        probe.exit(Phase::Observation);
        out
    }
}
