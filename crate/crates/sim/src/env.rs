//! Reset/step/close handle over one world.
//!
//! Built-in controllers act on their own; external agents take action codes
//! from the caller. Observations leave as flat byte buffers described by a
//! manifest. The episode runner is built on this type, so scripted callers
//! and the CLI take the same code path.

use std::path::Path;

use gridsim_core::{
    Action, ActionCode, ActionCodeError, AstarForager, Controller, ControllerInput, Field, Idle, ItemId, MaxSteps,
    Observation, Outcome, PhaseProbe, Pose, RandomWalker, StepEvent, TerminationStatus, VisionMode, World,
};
use thiserror::Error;

use crate::scenario::{load_scenario, ControllerKind, Scenario, ScenarioError};

#[derive(Debug, Error)]
pub enum EnvError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Engine(#[from] gridsim_core::Error),
    #[error("agent {0} does not exist")]
    UnknownAgent(ItemId),
    #[error("no action given for external agent {agent}{}", label(.name))]
    MissingAction { agent: ItemId, name: Option<String> },
    #[error("agent {0} is driven by a built-in controller and takes no external action")]
    NotExternal(ItemId),
    #[error("agent {agent}: {source}")]
    BadCode { agent: ItemId, source: ActionCodeError },
    #[error("episode has terminated; call reset")]
    Terminated,
}

fn label(name: &Option<String>) -> String {
    name.as_ref().map(|n| format!(" ({n})")).unwrap_or_default()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EnvOptions {
    pub seed: Option<u64>,
    pub max_steps: Option<MaxSteps>,
    /// Treat every agent as external, e.g. to replay recorded actions.
    pub all_external: bool,
}

struct Slot {
    id: ItemId,
    name: Option<String>,
    controller: Option<Box<dyn Controller + Send>>,
    outcome: Outcome,
}

fn controller(kind: ControllerKind, n: usize) -> Option<Box<dyn Controller + Send>> {
    match kind {
        ControllerKind::RandomWalker => Some(Box::new(RandomWalker)),
        ControllerKind::Astar => Some(Box::new(AstarForager::new(n))),
        ControllerKind::Noop => Some(Box::new(Idle)),
        ControllerKind::External => None,
    }
}

/// Result of one [`Env::step`]; every per-agent list follows action order.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvStep {
    pub actions: Vec<(ItemId, Action)>,
    pub observations: Vec<(ItemId, Observation)>,
    pub rewards: Vec<(ItemId, f64)>,
    pub events: Vec<StepEvent>,
    pub status: TerminationStatus,
}

impl EnvStep {
    pub fn terminated(&self) -> bool {
        self.status.terminated
    }
}

/// Name, shape and byte offset of one field inside a flattened observation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestEntry {
    pub name: String,
    pub shape: Vec<usize>,
    pub offset: usize,
}

pub fn manifest(obs: &Observation) -> Vec<ManifestEntry> {
    let mut offset = 0;
    obs.manifest()
        .into_iter()
        .map(|(field, shape)| {
            let name = match field {
                Field::Observability => "observability".to_string(),
                Field::Food => "food".to_string(),
                Field::SelfPosition => "self_position".to_string(),
                Field::SelfOrientation => "self_orientation".to_string(),
                Field::OtherPosition(id) => format!("agent_{}_position", id.0),
                Field::OtherOrientation(id) => format!("agent_{}_orientation", id.0),
            };
            let entry = ManifestEntry { name, offset, shape: shape.clone() };
            offset += shape.iter().product::<usize>();
            entry
        })
        .collect()
}

pub struct Env {
    scenario: Scenario,
    world: World,
    slots: Vec<Slot>,
}

impl Env {
    /// Loads a scenario file and starts its first episode.
    pub fn make(path: impl AsRef<Path>, seed: Option<u64>) -> Result<Self, EnvError> {
        let scenario = load_scenario(path)?;
        Self::new(scenario, EnvOptions { seed, ..EnvOptions::default() })
    }

    pub fn new(scenario: Scenario, options: EnvOptions) -> Result<Self, EnvError> {
        let seed = options.seed.unwrap_or(scenario.seed);
        let max_steps = options.max_steps.unwrap_or(scenario.max_steps());
        let (config, dists, specs) = scenario.world_parts(seed, max_steps);
        let world = World::new(config, dists, specs).map_err(gridsim_core::Error::from)?;
        let n = scenario.world_size;
        let slots = scenario
            .agents_in_order()
            .into_iter()
            .map(|a| Slot {
                id: ItemId(a.id),
                name: a.name.clone(),
                controller: if options.all_external { None } else { controller(a.controller, n) },
                outcome: Outcome::None,
            })
            .collect();
        let mut env = Self { scenario, world, slots };
        env.start_episode()?;
        Ok(env)
    }

    fn start_episode(&mut self) -> Result<(), EnvError> {
        self.world.generate().map_err(gridsim_core::Error::from)?;
        let n = self.world.size();
        for s in &mut self.slots {
            s.outcome = Outcome::None;
            if let Some(c) = s.controller.as_mut() {
                c.reset(n);
            }
        }
        Ok(())
    }

    /// Regenerates the world, optionally reseeding first, and returns the
    /// initial observations. Without a seed the generator stream continues.
    pub fn reset(&mut self, seed: Option<u64>) -> Result<Vec<(ItemId, Observation)>, EnvError> {
        if let Some(s) = seed {
            self.world.reseed(s);
        }
        self.start_episode()?;
        self.observations()
    }

    pub fn observations(&self) -> Result<Vec<(ItemId, Observation)>, EnvError> {
        Ok(self.world.observations().map_err(gridsim_core::Error::from)?)
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn action_order(&self) -> Vec<ItemId> {
        self.slots.iter().map(|s| s.id).collect()
    }

    pub fn external_agents(&self) -> Vec<ItemId> {
        self.slots.iter().filter(|s| s.controller.is_none()).map(|s| s.id).collect()
    }

    /// Collects one action per agent in action order: external agents from
    /// `external`, the rest from their controllers, which draw from the world
    /// generator in action order.
    pub fn decide(&mut self, external: &[(ItemId, ActionCode)]) -> Result<Vec<(ItemId, Action)>, EnvError> {
        if self.world.is_terminated() {
            return Err(EnvError::Terminated);
        }
        for (id, _) in external {
            match self.slots.iter().find(|s| s.id == *id) {
                None => return Err(EnvError::UnknownAgent(*id)),
                Some(s) if s.controller.is_some() => return Err(EnvError::NotExternal(*id)),
                Some(_) => {}
            }
        }
        let step = self.world.step_count();
        let mut actions = Vec::with_capacity(self.slots.len());
        for slot in &mut self.slots {
            let action = match slot.controller.as_mut() {
                None => {
                    let code = external
                        .iter()
                        .rev()
                        .find(|(id, _)| *id == slot.id)
                        .map(|&(_, c)| c)
                        .ok_or_else(|| EnvError::MissingAction { agent: slot.id, name: slot.name.clone() })?;
                    Action::decode(code).map_err(|source| EnvError::BadCode { agent: slot.id, source })?
                }
                Some(c) => {
                    let obs = self.world.observe_in(slot.id, VisionMode::Allocentric).map_err(gridsim_core::Error::from)?;
                    let body = self.world.agent(slot.id).expect("slot ids are agents");
                    let pose = Pose { position: body.position, orientation: body.orientation };
                    let input = ControllerInput { observation: &obs, pose, outcome: slot.outcome, step };
                    c.act(&input, self.world.rng_mut())
                }
            };
            actions.push((slot.id, action));
        }
        Ok(actions)
    }

    /// Runs one engine step with fully specified actions.
    pub fn apply<P: PhaseProbe>(&mut self, actions: Vec<(ItemId, Action)>, probe: &mut P) -> Result<EnvStep, EnvError> {
        if self.world.is_terminated() {
            return Err(EnvError::Terminated);
        }
        let r = self.world.step_probed(&actions, probe)?;
        for slot in &mut self.slots {
            slot.outcome = Outcome::from_events(slot.id, &r.events);
        }
        Ok(EnvStep { actions, observations: r.observations, rewards: r.rewards, events: r.events, status: r.terminated })
    }

    pub fn step(&mut self, external: &[(ItemId, ActionCode)]) -> Result<EnvStep, EnvError> {
        let actions = self.decide(external)?;
        self.apply(actions, &mut ())
    }

    /// Releases the world. Dropping the handle has the same effect.
    pub fn close(self) {}
}
