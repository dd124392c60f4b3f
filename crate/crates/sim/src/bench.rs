//! Throughput measurement: episodes run back to back, regenerating at
//! termination, with time split by phase.

use std::fmt;
use std::time::{Duration, Instant};

use gridsim_core::{Phase, PhaseProbe};

use crate::env::{Env, EnvOptions};
use crate::runner::{require_builtin, RunError};
use crate::scenario::Scenario;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Budget {
    Steps(u64),
    Seconds(f64),
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PhaseTimes {
    pub autopilot: Duration,
    pub dynamics: Duration,
    pub vision: Duration,
    pub observation: Duration,
}

impl PhaseTimes {
    fn add(&mut self, o: &PhaseTimes) {
        self.autopilot += o.autopilot;
        self.dynamics += o.dynamics;
        self.vision += o.vision;
        self.observation += o.observation;
    }
}

#[derive(Default)]
struct Stopwatch {
    started: Option<Instant>,
    times: PhaseTimes,
}

impl PhaseProbe for Stopwatch {
    fn enter(&mut self, _: Phase) {
        self.started = Some(Instant::now());
    }

    fn exit(&mut self, phase: Phase) {
        let dt = self.started.take().map_or(Duration::ZERO, |t| t.elapsed());
        match phase {
            Phase::Dynamics => self.times.dynamics += dt,
            Phase::Vision => self.times.vision += dt,
            Phase::Observation => self.times.observation += dt,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub world_size: usize,
    pub agents: usize,
    pub workers: usize,
    pub steps: u64,
    pub episodes: u64,
    pub elapsed: Duration,
    /// Summed over workers.
    pub phases: PhaseTimes,
}

impl BenchReport {
    pub fn steps_per_second(&self) -> f64 {
        self.steps as f64 / self.elapsed.as_secs_f64().max(1e-12)
    }
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{n}x{n} world, {a} agent(s), {w} worker(s): {s} steps in {e} episodes over {t:.3} s = {r:.0} steps/s",
            n = self.world_size,
            a = self.agents,
            w = self.workers,
            s = self.steps,
            e = self.episodes,
            t = self.elapsed.as_secs_f64(),
            r = self.steps_per_second()
        )?;
        let steps = self.steps.max(1) as f64;
        let p = &self.phases;
        for (name, d) in
            [("autopilot", p.autopilot), ("dynamics", p.dynamics), ("vision", p.vision), ("observation", p.observation)]
        {
            writeln!(f, "  {name:<12} {:>9.2} us/step", d.as_secs_f64() * 1e6 / steps)?;
        }
        Ok(())
    }
}

struct WorkerResult {
    steps: u64,
    episodes: u64,
    phases: PhaseTimes,
}

fn worker(scenario: &Scenario, budget: Budget, seed: Option<u64>) -> Result<WorkerResult, RunError> {
    let mut env = Env::new(scenario.clone(), EnvOptions { seed, ..EnvOptions::default() })?;
    let mut watch = Stopwatch::default();
    let (mut steps, mut episodes) = (0u64, 1u64);
    let start = Instant::now();
    loop {
        let done = match budget {
            Budget::Steps(n) => steps >= n,
            Budget::Seconds(s) => start.elapsed().as_secs_f64() >= s,
        };
        if done {
            break;
        }
        if env.world().is_terminated() {
            env.reset(None)?;
            episodes += 1;
        }
        let t = Instant::now();
        let actions = env.decide(&[])?;
        watch.times.autopilot += t.elapsed();
        env.apply(actions, &mut watch)?;
        steps += 1;
    }
    Ok(WorkerResult { steps, episodes, phases: watch.times })
}

/// Single worker on the scenario's own seed.
pub fn benchmark(scenario: &Scenario, budget: Budget) -> Result<BenchReport, RunError> {
    benchmark_workers(scenario, budget, 1)
}

/// `workers` independent worlds on threads, seeded `seed`, `seed + 1`, …;
/// the report aggregates their steps over the common wall time.
pub fn benchmark_workers(scenario: &Scenario, budget: Budget, workers: usize) -> Result<BenchReport, RunError> {
    require_builtin(scenario)?;
    let workers = workers.max(1);
    let start = Instant::now();
    let results: Vec<Result<WorkerResult, RunError>> = if workers == 1 {
        vec![worker(scenario, budget, None)]
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..workers)
                .map(|k| {
                    let seed = Some(scenario.seed.wrapping_add(k as u64));
                    s.spawn(move || worker(scenario, budget, seed))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("bench worker panicked")).collect()
        })
    };
    let elapsed = start.elapsed();
    let mut report = BenchReport {
        world_size: scenario.world_size,
        agents: scenario.agents.len(),
        workers,
        steps: 0,
        episodes: 0,
        elapsed,
        phases: PhaseTimes::default(),
    };
    for r in results {
        let r = r?;
        report.steps += r.steps;
        report.episodes += r.episodes;
        report.phases.add(&r.phases);
    }
    Ok(report)
}
