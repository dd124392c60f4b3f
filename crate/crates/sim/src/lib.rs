//! Scenario files, episode runner, traces, rendering and benchmarks on top of
//! [`gridsim_core`].

pub mod bench;
pub mod env;
pub mod hooks;
pub mod render;
pub mod runner;
pub mod scenario;
pub mod trace;

pub use bench::{benchmark, benchmark_workers, BenchReport, Budget, PhaseTimes};
pub use env::{manifest, Env, EnvError, EnvOptions, EnvStep, ManifestEntry};
pub use render::{render_ppm, render_text, RenderFrame};
pub use runner::{replay, run_episode, run_episode_with, Overrides, RunError};
pub use scenario::{load_scenario, parse_scenario, ControllerKind, Scenario, ScenarioError, SchemaError};
pub use trace::{EpisodeTrace, StepRecord, TraceHeader};
