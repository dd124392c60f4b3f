mod common;

use gridsim::{manifest, replay, run_episode, Env, EnvError, EnvOptions, EpisodeTrace, Overrides, StepRecord};
use gridsim_core::{Action, ActionCode, ItemId, TerminationCause, VisionMode};

fn external(scenario: gridsim::Scenario) -> Env {
    Env::new(scenario, EnvOptions { all_external: true, ..EnvOptions::default() }).unwrap()
}

#[test]
fn out_of_range_codes_are_rejected() {
    let mut env = external(common::noop_agents(3, &[0], &[0]));
    let e = env.step(&[(ItemId(0), ActionCode::Primitive(9))]).unwrap_err();
    assert!(matches!(e, EnvError::BadCode { agent: ItemId(0), .. }), "{e:?}");
    let e = env.step(&[(ItemId(0), ActionCode::Pair(4, 4))]).unwrap_err();
    assert!(matches!(e, EnvError::BadCode { .. }), "{e:?}");
    assert_eq!(env.world().step_count(), 0);
}

#[test]
fn missing_action_names_the_agent() {
    let mut env = external(common::scenario(
        r#"{"world_size": 4, "agents": [
            {"id": 0, "controller": "external", "name": "left"},
            {"id": 1, "controller": "external", "name": "right"}]}"#,
    ));
    let e = env.step(&[(ItemId(0), ActionCode::Primitive(8))]).unwrap_err();
    assert!(e.to_string().contains("right"), "{e}");
    let e = env.step(&[(ItemId(5), ActionCode::Primitive(8))]).unwrap_err();
    assert!(matches!(e, EnvError::UnknownAgent(ItemId(5))));
}

#[test]
fn mixed_control_takes_codes_only_for_external_agents() {
    let s = common::noop_agents(5, &[0, 1], &[1]);
    let mut env = Env::new(s, EnvOptions::default()).unwrap();
    assert_eq!(env.external_agents(), vec![ItemId(1)]);
    let e = env.step(&[(ItemId(0), ActionCode::Primitive(8)), (ItemId(1), ActionCode::Primitive(8))]).unwrap_err();
    assert!(matches!(e, EnvError::NotExternal(ItemId(0))));
    let s = env.step(&[(ItemId(1), ActionCode::Primitive(8))]).unwrap();
    assert_eq!(s.actions, vec![(ItemId(0), Action::NoOp), (ItemId(1), Action::NoOp)]);
    assert_eq!(s.rewards, vec![(ItemId(0), -0.1), (ItemId(1), -0.1)]);
}

#[test]
fn stepping_a_finished_episode_fails_until_reset() {
    let mut env = external(common::noop_agents(3, &[0], &[0]));
    let noop = [(ItemId(0), ActionCode::Primitive(8))];
    for _ in 0..5 {
        env.step(&noop).unwrap();
    }
    assert_eq!(env.world().status().cause, TerminationCause::MaxSteps);
    assert!(matches!(env.step(&noop), Err(EnvError::Terminated)));
    env.reset(None).unwrap();
    assert_eq!(env.world().step_count(), 0);
    env.step(&noop).unwrap();
    env.close();
}

#[test]
fn reset_with_a_seed_restarts_that_seed() {
    let s = common::shipped();
    let mut a = Env::new(s.clone(), EnvOptions { seed: Some(11), ..EnvOptions::default() }).unwrap();
    let first = a.observations().unwrap();
    a.step(&[]).unwrap();
    a.reset(None).unwrap();
    let again = a.reset(Some(11)).unwrap();
    assert_eq!(first, again);
    let b = Env::make(common::shipped_path(), Some(11)).unwrap();
    assert_eq!(b.observations().unwrap(), first);
}

#[test]
fn observation_buffers_follow_the_manifest() {
    let s = common::scenario(
        r#"{"world_size": 6, "agents": [
            {"id": 4, "controller": "external", "vision": {"mode": "egocentric"}},
            {"id": 2, "controller": "external"},
            {"id": 9, "controller": "external"}],
            "action_order": [9, 4, 2]}"#,
    );
    let env = external(s);
    let obs = env.observations().unwrap();
    assert_eq!(obs.iter().map(|(id, _)| id.0).collect::<Vec<_>>(), vec![9, 4, 2]);
    for (id, o) in &obs {
        let side = if *id == ItemId(4) { 11 } else { 6 };
        assert_eq!(o.side, side);
        assert_eq!(o.frame, if *id == ItemId(4) { VisionMode::Egocentric } else { VisionMode::Allocentric });
        let m = manifest(o);
        let names: Vec<&str> = m.iter().map(|e| e.name.as_str()).collect();
        let others: Vec<u32> = [9, 4, 2].into_iter().filter(|o| *o != id.0).collect();
        let mut want = vec!["observability".to_string(), "food".into(), "self_position".into(), "self_orientation".into()];
        for o in others {
            want.push(format!("agent_{o}_position"));
            want.push(format!("agent_{o}_orientation"));
        }
        assert_eq!(names, want);
        let flat = o.flatten();
        let last = m.last().unwrap();
        assert_eq!(flat.len(), last.offset + last.shape.iter().product::<usize>());
        assert_eq!(m[0].shape, vec![side, side]);
        assert_eq!(m[3].shape, vec![4]);
        let pos = &flat[m[2].offset..m[2].offset + side * side];
        assert_eq!(pos.iter().filter(|b| **b == 1).count(), 1);
    }
}

#[test]
fn driving_through_env_matches_the_runner() {
    let s = common::shipped();
    for seed in [7, 8, 9] {
        let trace = run_episode(&s, &Overrides { seed: Some(seed), ..Overrides::default() }).unwrap();
        let mut env = Env::new(s.clone(), EnvOptions { seed: Some(seed), all_external: true, ..EnvOptions::default() })
            .unwrap();
        let mut steps = Vec::new();
        for rec in &trace.steps {
            let r = env.step(&rec.actions()).unwrap();
            steps.push(StepRecord::from_step(env.world().step_count(), &r, false));
        }
        assert_eq!(steps, trace.steps);
        assert!(env.world().is_terminated());
        let again = EpisodeTrace { header: trace.header.clone(), steps };
        assert_eq!(replay(&s, &again).unwrap(), trace);
    }
}

#[test]
fn invalid_path_is_an_error() {
    let r = Env::make("/nonexistent/scenario.json", None);
    assert!(matches!(r, Err(EnvError::Scenario(gridsim::ScenarioError::Io { .. }))));
}

#[test]
fn competition_with_both_agents_external() {
    let env = external(common::shipped());
    assert_eq!(env.external_agents(), vec![ItemId(0), ItemId(1)]);
    assert_eq!(env.observations().unwrap().len(), 2);
}

#[test]
fn reset_after_termination_brings_food_back() {
    let mut env = Env::new(common::shipped(), EnvOptions::default()).unwrap();
    while !env.step(&[]).unwrap().terminated() {}
    assert!(env.world().foods().iter().all(|f| f.consumed));
    let obs = env.reset(None).unwrap();
    assert!(env.world().foods().iter().all(|f| !f.consumed));
    let seen = obs.iter().any(|(_, o)| o.food.contains(&1));
    let food = env.world().foods()[0].position;
    let visible = env.action_order().iter().any(|id| env.world().compute_visibility(*id).unwrap().is_visible(food));
    assert_eq!(seen, visible);
}
