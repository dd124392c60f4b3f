use gridsim_core::{ItemId, MaxSteps};
use log::debug;
use thiserror::Error;

use crate::env::{Env, EnvError, EnvOptions, EnvStep};
use crate::scenario::{ControllerKind, Scenario};
use crate::trace::{EpisodeTrace, StepRecord, TraceHeader};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(
        "agent {agent} uses the external controller; the runner only drives built-in controllers. \
         Drive external agents step by step through the Env API instead"
    )]
    ExternalController { agent: ItemId },
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error("trace was recorded for scenario {expected}, not {found}")]
    DigestMismatch { expected: String, found: String },
    #[error("step {step}: {source}")]
    BadTraceAction { step: u64, source: gridsim_core::ActionCodeError },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub max_steps: Option<u64>,
    pub record_observations: bool,
}

/// Fails unless every agent has a built-in controller.
pub fn require_builtin(scenario: &Scenario) -> Result<(), RunError> {
    match scenario.agents.iter().find(|a| a.controller == ControllerKind::External) {
        Some(a) => Err(RunError::ExternalController { agent: ItemId(a.id) }),
        None => Ok(()),
    }
}

fn header(scenario: &Scenario, env: &Env) -> TraceHeader {
    let c = env.world().config();
    TraceHeader::new(scenario.digest(), c.seed, c.max_steps, &env.action_order())
}

fn options(o: &Overrides) -> EnvOptions {
    EnvOptions { seed: o.seed, max_steps: o.max_steps.map(MaxSteps::Limited), all_external: false }
}

/// Generates a world and lets the built-in controllers play until termination.
pub fn run_episode(scenario: &Scenario, overrides: &Overrides) -> Result<EpisodeTrace, RunError> {
    run_episode_with(scenario, overrides, |_, _| {})
}

/// As [`run_episode`], calling `observe` once before the first step (with no
/// step result) and after every step.
pub fn run_episode_with(
    scenario: &Scenario,
    overrides: &Overrides,
    mut observe: impl FnMut(&Env, Option<&EnvStep>),
) -> Result<EpisodeTrace, RunError> {
    require_builtin(scenario)?;
    let mut env = Env::new(scenario.clone(), options(overrides))?;
    let mut trace = EpisodeTrace { header: header(scenario, &env), steps: Vec::new() };
    observe(&env, None);
    loop {
        let s = env.step(&[])?;
        trace.steps.push(StepRecord::from_step(env.world().step_count(), &s, overrides.record_observations));
        observe(&env, Some(&s));
        if s.terminated() {
            break;
        }
    }
    debug!("episode over after {} steps: {:?}", trace.steps.len(), trace.cause());
    Ok(trace)
}

/// Feeds a trace's recorded actions back through a fresh episode and records
/// what happens. For a faithful trace the result equals the input.
pub fn replay(scenario: &Scenario, trace: &EpisodeTrace) -> Result<EpisodeTrace, RunError> {
    let digest = scenario.digest();
    if digest != trace.header.scenario_digest {
        return Err(RunError::DigestMismatch { expected: trace.header.scenario_digest.clone(), found: digest });
    }
    let opts = EnvOptions { seed: Some(trace.header.seed), max_steps: Some(trace.header.max_steps()), all_external: true };
    let mut env = Env::new(scenario.clone(), opts)?;
    let mut out = EpisodeTrace { header: header(scenario, &env), steps: Vec::new() };
    for rec in &trace.steps {
        let actions = rec.decoded_actions().map_err(|source| RunError::BadTraceAction { step: rec.step, source })?;
        let with_obs = rec.observations.is_some();
        let s = env.apply(actions, &mut ())?;
        out.steps.push(StepRecord::from_step(env.world().step_count(), &s, with_obs));
        if s.terminated() {
            break;
        }
    }
    Ok(out)
}
