mod common;

use gridsim::{parse_scenario, ControllerKind};
use gridsim_core::ObstacleKind;

fn errors(json: &str) -> Vec<gridsim::SchemaError> {
    parse_scenario(json).expect_err("document should be rejected")
}

#[test]
fn empty_document_lacks_world_size() {
    let e = errors("{}");
    assert_eq!(e.len(), 1);
    assert!(e[0].message.contains("world_size"), "{}", e[0]);
}

#[test]
fn unknown_keys_are_rejected_with_their_position() {
    let e = errors("{\n  \"world_size\": 3,\n  \"colour\": 1\n}");
    assert!(e[0].message.contains("colour"), "{}", e[0]);
    assert_eq!(e[0].line, 3);
}

#[test]
fn dangling_pdm_is_named() {
    let e = errors(r#"{"world_size": 4, "foods": [{"id": 0, "pdm": "ghost"}]}"#);
    assert_eq!(e.len(), 1);
    assert_eq!(e[0].path, "foods[0].pdm");
    assert!(e[0].message.contains("ghost"));
}

#[test]
fn every_semantic_problem_is_reported() {
    let e = errors(
        r#"{
  "world_size": 3,
  "max_steps": 0,
  "prng": "mt19937",
  "reward_scheme": {"hook": "bonus"},
  "pdms": {"p": {"cells": [[5, 5]]}},
  "foods": [{"id": 1}],
  "agents": [
    {"id": 1, "controller": "noop", "vision": {"angle": 400}},
    {"id": 2, "controller": "noop", "vision": {"range": -3}}
  ],
  "action_order": [2, 2]
}"#,
    );
    let paths: Vec<&str> = e.iter().map(|p| p.path.as_str()).collect();
    for want in [
        "max_steps",
        "prng",
        "reward_scheme.hook",
        "pdms.p",
        "agents[0].vision.angle",
        "agents[1].vision.range",
        "action_order",
    ] {
        assert!(paths.iter().any(|p| p.starts_with(want)), "no error at {want}: {paths:?}");
    }
    assert!(e.iter().any(|p| p.message.contains("duplicate")), "{e:?}");
    assert!(e.iter().all(|p| p.line > 0 && p.column > 0), "{e:?}");
}

#[test]
fn bad_shapes_and_overfull_boards_fail() {
    let e = errors(r#"{"world_size": 3, "obstacles": [{"id": 0, "kind": "wall", "shape": [[1, 0], [1]]}]}"#);
    assert_eq!(e[0].path, "obstacles[0].shape");
    let e = errors(
        r#"{"world_size": 1, "foods": [{"id": 0}], "agents": [{"id": 1, "controller": "noop"}]}"#,
    );
    assert!(e.iter().any(|p| p.message.contains("cells")), "{e:?}");
}

#[test]
fn round_trips_through_json() {
    let s = common::shipped();
    let again = parse_scenario(&s.to_json()).unwrap();
    assert_eq!(s, again);
    assert_eq!(s.digest(), again.digest());
}

#[test]
fn digest_tracks_content() {
    let a = common::shipped();
    let mut b = a.clone();
    b.seed += 1;
    assert_ne!(a.digest(), b.digest());
    assert_eq!(a.digest().len(), 64);
}

#[test]
fn shipped_scenario_has_the_expected_cast() {
    let s = common::shipped();
    assert_eq!(s.world_size, 11);
    assert_eq!(s.max_steps, Some(100));
    assert_eq!(s.agents.len(), 2);
    assert!(s.agents.iter().all(|a| a.controller == ControllerKind::Astar));
    assert_eq!(s.foods.len(), 1);
    assert_eq!(s.obstacles.len(), 1);
    let (config, pdms, elements) = s.world_parts(s.seed, s.max_steps());
    assert_eq!(config.world_size, 11);
    assert_eq!(elements.len(), 4);
    let mut w = gridsim_core::create_world(config, pdms, elements).unwrap();
    w.generate().unwrap();
    let walls: Vec<_> =
        w.obstacles().iter().filter(|o| o.kind == ObstacleKind::Wall).flat_map(|o| o.occupied_cells.clone()).collect();
    assert_eq!(walls.len(), 4);
    assert!(walls.iter().all(|p| p.col == 5));
}
