use std::collections::BTreeSet;
use std::sync::Arc;

use gridsim_core::*;
use gridsim_testkit::{agent_facing, Layout};
use proptest::prelude::*;

fn gp(r: usize, c: usize) -> GridPosition {
    GridPosition::new(r, c)
}

use Orientation::{East, North, South, West};

#[test]
fn free_move_edge_block_and_food() {
    let mut l = Layout::new(5);
    let a = l.agent(gp(0, 0), agent_facing(North));
    let food = l.food(gp(0, 2));
    l.food(gp(4, 4));
    let mut w = l.build();

    let r = w.step(&[(a, Action::Move(North))]).unwrap();
    assert_eq!(r.events, [StepEvent::BlockedByObstacle { agent: a }, StepEvent::TimeStep { agent: a }]);
    assert_eq!(w.agent(a).unwrap().position, gp(0, 0));
    assert_eq!(r.reward(a), Some(-0.1));

    let r = w.step(&[(a, Action::Move(East))]).unwrap();
    assert_eq!(r.events, [StepEvent::TimeStep { agent: a }]);
    assert_eq!(w.agent(a).unwrap().position, gp(0, 1));
    assert_eq!(w.agent(a).unwrap().orientation, North, "moving does not turn");

    let r = w.step(&[(a, Action::Move(East))]).unwrap();
    assert_eq!(r.events[0], StepEvent::FoodConsumed { agent: a, food });
    assert_eq!(r.reward(a), Some(9.9));
    assert!(w.foods()[0].consumed);
    assert!(w.food_at(gp(0, 2)).is_none());
    assert!(!r.terminated.terminated);
}

#[test]
fn composite_looks_then_moves() {
    let mut l = Layout::new(3);
    let a = l.agent(gp(1, 1), agent_facing(North));
    let mut w = l.build();
    let r = w.step(&[(a, Action::Composite { look: West, step: West })]).unwrap();
    assert_eq!(r.events, [StepEvent::TimeStep { agent: a }]);
    let body = w.agent(a).unwrap();
    assert_eq!((body.position, body.orientation), (gp(1, 0), West));

    let r = w.step(&[(a, Action::Composite { look: South, step: West })]).unwrap();
    assert_eq!(r.events[0], StepEvent::BlockedByObstacle { agent: a });
    assert_eq!(w.agent(a).unwrap().orientation, South);
}

#[test]
fn look_turns_without_moving() {
    let mut l = Layout::new(3);
    let a = l.agent(gp(1, 1), agent_facing(North));
    let mut w = l.build();
    w.step(&[(a, Action::Look(East))]).unwrap();
    assert_eq!(w.agent(a).unwrap().orientation, East);
    assert_eq!(w.agent(a).unwrap().position, gp(1, 1));
}

#[test]
fn water_and_walls_block_movement() {
    let mut l = Layout::new(3);
    let a = l.agent(gp(1, 1), agent_facing(North));
    l.obstacle(gp(0, 1), ObstacleKind::Wall);
    l.obstacle(gp(1, 2), ObstacleKind::Water);
    let mut w = l.build();
    for d in [North, East] {
        let r = w.step(&[(a, Action::Move(d))]).unwrap();
        assert_eq!(r.events[0], StepEvent::BlockedByObstacle { agent: a });
        assert_eq!(r.reward(a), Some(-0.1));
    }
    assert_eq!(w.agent(a).unwrap().position, gp(1, 1));
}

#[test]
fn reward_vectors_are_exact() {
    // time step only
    let mut l = Layout::new(3);
    let a = l.agent(gp(0, 0), AgentAttributes::default());
    l.food(gp(2, 2));
    let mut w = l.build();
    assert_eq!(w.step(&[(a, Action::NoOp)]).unwrap().reward(a), Some(-0.1));

    // food step, last food ends the episode
    let mut l = Layout::new(3);
    let a = l.agent(gp(0, 0), AgentAttributes::default());
    l.food(gp(0, 1));
    let mut w = l.build();
    let r = w.step(&[(a, Action::Move(East))]).unwrap();
    assert_eq!(r.reward(a), Some(9.9));
    assert_eq!(r.terminated, TerminationStatus::from_cause(TerminationCause::AllFoodConsumed));

    // weaker mover hits stronger occupant
    let mut l = Layout::new(3);
    let weak = l.agent(gp(0, 0), AgentAttributes { power: 1, ..Default::default() });
    let strong = l.agent(gp(0, 1), AgentAttributes { power: 2, ..Default::default() });
    l.food(gp(2, 2));
    let mut w = l.build();
    let r = w.step(&[(weak, Action::Move(East)), (strong, Action::NoOp)]).unwrap();
    assert_eq!(
        r.events[0],
        StepEvent::Collision { mover: weak, occupant: strong, mover_power: 1, occupant_power: 2 }
    );
    assert_eq!(r.reward(weak), Some(-10.1));
    assert_eq!(r.reward(strong), Some(-0.1));
    assert_eq!(w.agent(weak).unwrap().position, gp(0, 0));
    assert_eq!(w.agent(strong).unwrap().position, gp(0, 1));
}

#[test]
fn collision_charges_weaker_or_both() {
    let cases = [(3, 1, (-0.1, -10.1)), (2, 2, (-10.1, -10.1))];
    for (mover_power, occupant_power, (rm, ro)) in cases {
        let mut l = Layout::new(3);
        let m = l.agent(gp(0, 0), AgentAttributes { power: mover_power, ..Default::default() });
        let o = l.agent(gp(0, 1), AgentAttributes { power: occupant_power, ..Default::default() });
        l.food(gp(2, 2));
        let mut w = l.build();
        let r = w.step(&[(m, Action::Move(East))]).unwrap();
        assert_eq!((r.reward(m), r.reward(o)), (Some(rm), Some(ro)));
    }
}

#[test]
fn order_lets_a_vacate_for_b() {
    // A at (0,1) moves east, B at (0,0) moves east into the freed cell
    let mut l = Layout::new(3);
    let a = l.agent(gp(0, 1), AgentAttributes::default());
    let b = l.agent(gp(0, 0), AgentAttributes::default());
    l.food(gp(2, 2));
    let mut w = l.build();
    let r = w.step(&[(b, Action::Move(East)), (a, Action::Move(East))]).unwrap();
    assert!(r.events.iter().all(|e| matches!(e, StepEvent::TimeStep { .. })));
    assert_eq!(w.agent(a).unwrap().position, gp(0, 2));
    assert_eq!(w.agent(b).unwrap().position, gp(0, 1));
    assert_eq!(r.rewards.iter().map(|(id, _)| *id).collect::<Vec<_>>(), [a, b]);

    // reversed order: B bumps into A first
    let mut l = Layout::new(3);
    let b = l.agent(gp(0, 0), AgentAttributes::default());
    let a = l.agent(gp(0, 1), AgentAttributes::default());
    l.food(gp(2, 2));
    let mut w = l.build();
    let r = w.step(&[(b, Action::Move(East)), (a, Action::Move(East))]).unwrap();
    assert!(matches!(r.events[0], StepEvent::Collision { mover, occupant, .. } if mover == b && occupant == a));
    assert_eq!(w.agent(b).unwrap().position, gp(0, 0));
    assert_eq!(w.agent(a).unwrap().position, gp(0, 2));
}

#[test]
fn time_steps_follow_all_actions() {
    let mut l = Layout::new(4);
    let a = l.agent(gp(0, 0), AgentAttributes::default());
    let b = l.agent(gp(3, 3), AgentAttributes::default());
    l.food(gp(0, 1));
    l.food(gp(2, 2));
    let mut w = l.build();
    let r = w.step(&[(a, Action::Move(East)), (b, Action::Move(South))]).unwrap();
    assert_eq!(
        r.events,
        [
            StepEvent::FoodConsumed { agent: a, food: ItemId(2) },
            StepEvent::BlockedByObstacle { agent: b },
            StepEvent::TimeStep { agent: a },
            StepEvent::TimeStep { agent: b },
        ]
    );
}

#[test]
fn termination_priority_and_errors() {
    let mut l = Layout::new(3).max_steps(MaxSteps::Limited(1));
    let a = l.agent(gp(0, 0), AgentAttributes::default());
    l.food(gp(0, 1));
    let mut w = l.build();
    let r = w.step(&[(a, Action::Move(East))]).unwrap();
    assert_eq!(r.terminated.cause, TerminationCause::MaxSteps);
    assert!(matches!(w.step(&[]), Err(Error::State(StateError::Terminated))));
    assert!(matches!(w.apply_action(a, Action::NoOp), Err(Error::State(StateError::Terminated))));

    let mut l = Layout::new(3);
    l.agent(gp(0, 0), AgentAttributes::default());
    let mut w = l.build();
    assert!(matches!(
        w.step(&[(ItemId(77), Action::NoOp)]),
        Err(Error::Config(ConfigError::UnknownAgent(ItemId(77))))
    ));
    for _ in 0..99 {
        assert!(!w.step(&[]).unwrap().terminated.terminated, "no food never ends by consumption");
    }
    assert_eq!(w.step(&[]).unwrap().terminated.cause, TerminationCause::MaxSteps);
}

#[test]
fn ungenerated_world_refuses_to_step() {
    let config = WorldConfig {
        world_size: 3,
        max_steps: MaxSteps::Unlimited,
        reward_scheme: RewardScheme::default(),
        action_order: vec![ItemId(0)],
        seed: 0,
    };
    let mut w = create_world(config, DistributionSet::new(), vec![ElementSpec::agent(
        ItemId(0),
        AgentAttributes::default(),
        PdmRef::Uniform,
    )])
    .unwrap();
    assert!(matches!(w.step(&[]), Err(Error::State(StateError::NotGenerated))));
    assert!(w.observations().is_err());
}

#[test]
fn generate_resets_episode() {
    let mut l = Layout::new(3);
    let a = l.agent(gp(0, 0), agent_facing(South));
    l.food(gp(0, 1));
    let mut w = l.build();
    w.step(&[(a, Action::Composite { look: East, step: East })]).unwrap();
    assert!(w.is_terminated());
    w.generate().unwrap();
    assert_eq!(w.step_count(), 0);
    assert!(!w.is_terminated());
    assert!(!w.foods()[0].consumed);
    let body = w.agent(a).unwrap();
    assert_eq!((body.position, body.orientation), (gp(0, 0), South));
}

struct Broadcast;

impl RewardHook for Broadcast {
    fn reward(&self, scheme: &RewardScheme, event: &StepEvent, recipient: ItemId) -> f64 {
        match event {
            StepEvent::FoodConsumed { agent, .. } if *agent != recipient => -scheme.food,
            _ => scheme.default_reward(event, recipient),
        }
    }
}

#[test]
fn hook_reaches_every_agent() {
    let scheme = RewardScheme::default().with_hook(Arc::new(Broadcast));
    let mut l = Layout::new(3).scheme(scheme);
    let a = l.agent(gp(0, 0), AgentAttributes::default());
    let b = l.agent(gp(2, 2), AgentAttributes::default());
    l.food(gp(0, 1));
    l.food(gp(1, 1));
    let mut w = l.build();
    let r = w.step(&[(a, Action::Move(East))]).unwrap();
    assert_eq!(r.reward(a), Some(9.9));
    assert_eq!(r.reward(b), Some(-10.1));
}

fn random_world(seed: u64, n: usize, agents: usize, foods: usize, walls: usize) -> World {
    let mut specs = Vec::new();
    let mut order = Vec::new();
    let mut id = 0;
    for k in 0..agents {
        let attrs = AgentAttributes { power: (k % 2) as i32 + 1, ..Default::default() };
        specs.push(ElementSpec::agent(ItemId(id), attrs, PdmRef::Uniform));
        order.push(ItemId(id));
        id += 1;
    }
    for _ in 0..foods {
        specs.push(ElementSpec::food(ItemId(id), PdmRef::Uniform));
        id += 1;
    }
    for k in 0..walls {
        let kind = if k % 2 == 0 { ObstacleKind::Wall } else { ObstacleKind::Water };
        let shape = ShapeMatrix::from_bits(&[[1, 1]]).unwrap();
        specs.push(ElementSpec::obstacle(ItemId(id), kind, shape, PdmRef::Uniform));
        id += 1;
    }
    let config = WorldConfig {
        world_size: n,
        max_steps: MaxSteps::Unlimited,
        reward_scheme: RewardScheme::default(),
        action_order: order,
        seed,
    };
    let mut w = create_world(config, DistributionSet::new(), specs).unwrap();
    w.generate().unwrap();
    w
}

fn action() -> impl Strategy<Value = Action> {
    prop_oneof![
        (0u8..9).prop_map(|c| Action::from_code(c).unwrap()),
        (0u8..4, 4u8..8).prop_map(|(l, m)| Action::from_pair(l, m).unwrap()),
    ]
}

fn check_occupancy(w: &World) {
    let mut seen = BTreeSet::new();
    for a in w.agents() {
        assert!(seen.insert(a.position), "two agents share {}", a.position);
        assert!(w.obstacle_at(a.position).is_none());
        assert_eq!(w.agent_at(a.position).map(|b| b.id), Some(a.id));
    }
    for f in w.foods().iter().filter(|f| !f.consumed) {
        assert!(!seen.contains(&f.position), "agent standing on live food");
        assert_eq!(w.food_at(f.position).map(|g| g.id), Some(f.id));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn occupancy_and_food_are_conserved(
        seed in any::<u64>(),
        agents in 1usize..4,
        steps in prop::collection::vec(prop::collection::vec(action(), 3), 1..40),
    ) {
        let mut w = random_world(seed, 6, agents, 5, 3);
        let order = w.action_order().to_vec();
        let mut eaten = 0;
        for acts in steps {
            if w.is_terminated() {
                break;
            }
            let acts: Vec<_> = order.iter().copied().zip(acts).collect();
            let r = w.step(&acts).unwrap();
            let newly = r.events.iter().filter(|e| matches!(e, StepEvent::FoodConsumed { .. })).count();
            eaten += newly;
            let consumed = w.foods().iter().filter(|f| f.consumed).count();
            prop_assert_eq!(consumed, eaten);
            let foods: BTreeSet<_> = r.events.iter().filter_map(|e| match e {
                StepEvent::FoodConsumed { food, .. } => Some(*food),
                _ => None,
            }).collect();
            prop_assert_eq!(foods.len(), newly);
            prop_assert_eq!(r.events.iter().filter(|e| matches!(e, StepEvent::TimeStep { .. })).count(), agents);
            check_occupancy(&w);
        }
    }

    #[test]
    fn step_is_a_fold_of_single_actions(
        seed in any::<u64>(),
        acts in prop::collection::vec(action(), 3),
    ) {
        let mut stepped = random_world(seed, 5, 3, 4, 2);
        let mut folded = stepped.clone();
        let order = stepped.action_order().to_vec();
        let pairs: Vec<_> = order.iter().copied().zip(acts.iter().copied()).collect();
        // reversed submission order must not matter
        let mut submitted = pairs.clone();
        submitted.reverse();
        let r = stepped.step(&submitted).unwrap();
        let mut events = Vec::new();
        for &(id, a) in &pairs {
            events.extend(folded.apply_action(id, a).unwrap());
        }
        prop_assert_eq!(&r.events[..events.len()], &events[..]);
        prop_assert_eq!(stepped.agents(), folded.agents());
        prop_assert_eq!(stepped.foods(), folded.foods());
    }
}
