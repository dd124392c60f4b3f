#![allow(dead_code)]

use std::path::PathBuf;

use gridsim::{parse_scenario, EpisodeTrace, Scenario};

pub fn shipped_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios/two_agent_competition.json")
}

pub fn shipped() -> Scenario {
    gridsim::load_scenario(shipped_path()).expect("shipped scenario parses")
}

pub fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/two_agent_competition_seed7.jsonl")
}

/// Reads the golden trace, or rewrites it from `fresh` when `GRIDSIM_BLESS` is set.
pub fn golden(fresh: &EpisodeTrace) -> EpisodeTrace {
    let path = golden_path();
    if std::env::var_os("GRIDSIM_BLESS").is_some() {
        std::fs::write(&path, fresh.to_jsonl()).expect("write golden trace");
    }
    let text = std::fs::read_to_string(&path).expect("golden trace exists; run with GRIDSIM_BLESS=1 to create it");
    EpisodeTrace::from_jsonl(&text).expect("golden trace parses")
}

/// The engine version is allowed to move without invalidating recorded runs.
pub fn same_run(a: &EpisodeTrace, b: &EpisodeTrace) -> bool {
    let mut h = b.header.clone();
    h.engine_version = a.header.engine_version.clone();
    a.header == h && a.steps == b.steps
}

pub fn scenario(json: &str) -> Scenario {
    parse_scenario(json).unwrap_or_else(|e| panic!("{e:?}"))
}

/// One NoOp agent per id on a `size` board, placed uniformly, no food.
pub fn noop_agents(size: usize, ids: &[u32], external: &[u32]) -> Scenario {
    let agents: Vec<String> = ids
        .iter()
        .map(|id| {
            let c = if external.contains(id) { "external" } else { "noop" };
            format!(r#"{{"id": {id}, "controller": "{c}"}}"#)
        })
        .collect();
    scenario(&format!(r#"{{"world_size": {size}, "max_steps": 5, "agents": [{}]}}"#, agents.join(",")))
}
