//! Deterministic multi-agent grid-world engine.
//!
//! The crate is `no_std` and needs only `alloc`. A [`World`] owns the whole
//! simulation state, including its seeded generator; identical configuration,
//! seed and action sequence reproduce a run bit for bit.
//!
//! ```
//! use gridsim_core::*;
//!
//! let config = WorldConfig {
//!     world_size: 5,
//!     max_steps: MaxSteps::Limited(20),
//!     reward_scheme: RewardScheme::default(),
//!     action_order: vec![ItemId(0)],
//!     seed: 3,
//! };
//! let elements = vec![
//!     ElementSpec::agent(ItemId(0), AgentAttributes::default(), PdmRef::Uniform),
//!     ElementSpec::food(ItemId(1), PdmRef::Uniform),
//! ];
//! let mut world = create_world(config, DistributionSet::new(), elements).unwrap();
//! world.generate().unwrap();
//! let result = world.step(&[(ItemId(0), Action::NoOp)]).unwrap();
//! assert_eq!(result.reward(ItemId(0)), Some(-0.1));
//! ```

#![no_std]

extern crate alloc;

pub mod autopilot;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod placement;
pub mod rng;
pub mod vision;
pub mod world;

pub use autopilot::{
    a_star, algorithmic_policy, random_walker, update_known_map, AstarForager, AutopilotState, Controller,
    ControllerInput, Idle, Knowledge, KnownMap, Outcome, Pose, RandomWalker,
};
pub use dynamics::{Action, ActionCode, ActionCodeError, Phase, PhaseProbe, RewardHook, RewardScheme, StepEvent, StepResult};
pub use error::{ConfigError, Error, PdmError, PlacementError, ShapeError, StateError};
pub use grid::{Grid, GridPosition, Orientation};
pub use placement::{place_all, sample_position, stamp_obstacle, ElementClass, Pdm, PlacementRequest, ShapeMatrix};
pub use rng::{SimRng, PRNG_NAME};
pub use vision::{
    build_allocentric, build_egocentric, compute_visibility, field_of_view, Field, Observation, OtherAgentView,
    VisibilityMask, VisionMode, VisionParams, VisionRange,
};
pub use world::{
    create_world, AgentAttributes, AgentBody, DistributionSet, ElementKind, ElementSpec, Food, ItemId, MaxSteps,
    Obstacle, ObstacleKind, PdmRef, TerminationCause, TerminationStatus, World, WorldConfig,
};
