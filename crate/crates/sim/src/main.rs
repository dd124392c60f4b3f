use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gridsim::env::EnvError;
use gridsim::{
    benchmark_workers, load_scenario, render_ppm, render_text, run_episode_with, Budget, Overrides, RunError,
    ScenarioError,
};
use log::info;

/// Deterministic multi-agent grid-world simulator.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play one episode with the scenario's built-in controllers.
    Run(RunArgs),
    /// Measure engine steps per second.
    Bench(BenchArgs),
    /// Check a scenario file and report every problem found.
    Validate { scenario: PathBuf },
}

#[derive(Args)]
struct RunArgs {
    scenario: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_steps: Option<u64>,
    /// Write the JSONL trace here; `-` for stdout.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Include flattened observations in the trace.
    #[arg(long)]
    observations: bool,
    /// Write a text and a PPM frame per step into this directory.
    #[arg(long)]
    render: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    scenario: PathBuf,
    #[arg(long, conflicts_with = "seconds")]
    steps: Option<u64>,
    #[arg(long)]
    seconds: Option<f64>,
    /// Independent worlds on separate threads; the report aggregates them.
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

enum Failure {
    Schema(String),
    Other(String),
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Schema(_) => Failure::Schema(e.to_string()),
            ScenarioError::Io { .. } => Failure::Other(e.to_string()),
        }
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Env(EnvError::Scenario(s)) => s.into(),
            e => Failure::Other(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

fn write_frame(dir: &Path, index: u64, env: &gridsim::Env) -> std::io::Result<()> {
    let text = render_text(env.world()).to_string();
    fs::write(dir.join(format!("frame_{index:05}.txt")), text)?;
    fs::write(dir.join(format!("frame_{index:05}.ppm")), render_ppm(env.world(), 16))
}

fn run(args: RunArgs) -> Result<(), Failure> {
    let scenario = load_scenario(&args.scenario)?;
    let overrides = Overrides { seed: args.seed, max_steps: args.max_steps, record_observations: args.observations };
    if let Some(dir) = &args.render {
        fs::create_dir_all(dir)?;
    }
    let mut io_error = None;
    let trace = run_episode_with(&scenario, &overrides, |env, _| {
        if let (Some(dir), None) = (&args.render, &io_error) {
            if let Err(e) = write_frame(dir, env.world().step_count(), env) {
                io_error = Some(e);
            }
        }
    })?;
    if let Some(e) = io_error {
        return Err(e.into());
    }
    let text = trace.to_jsonl();
    match args.trace.as_deref() {
        Some(p) if p == Path::new("-") => print!("{text}"),
        Some(p) => fs::write(p, text)?,
        None => {}
    }
    if args.trace.as_deref() != Some(Path::new("-")) {
        println!("steps: {}", trace.steps.len());
        println!("cause: {:?}", trace.cause());
        for id in &trace.header.action_order {
            println!("agent {id} return: {:.4}", trace.total_reward(*id));
        }
    }
    Ok(())
}

fn bench(args: BenchArgs) -> Result<(), Failure> {
    let scenario = load_scenario(&args.scenario)?;
    let budget = match (args.steps, args.seconds) {
        (Some(n), _) => Budget::Steps(n),
        (None, Some(s)) => Budget::Seconds(s),
        (None, None) => Budget::Seconds(5.0),
    };
    info!("benchmarking {} with {:?}", args.scenario.display(), budget);
    let report = benchmark_workers(&scenario, budget, args.workers)?;
    print!("{report}");
    Ok(())
}

fn validate(path: &Path) -> Result<(), Failure> {
    let s = load_scenario(path)?;
    println!(
        "ok: {n}x{n} world, {} agent(s), {} food, {} obstacle(s)",
        s.agents.len(),
        s.foods.len(),
        s.obstacles.len(),
        n = s.world_size
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("GRIDSIM_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Bench(a) => bench(a),
        Command::Validate { scenario } => validate(&scenario),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Schema(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
