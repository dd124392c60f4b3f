use alloc::string::String;

use thiserror::Error;

use crate::world::ItemId;

/// Invalid world or element configuration, detected before anything runs.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("world size must be at least 1")]
    EmptyWorld,
    #[error("max_steps must be positive")]
    ZeroMaxSteps,
    #[error("duplicate element identifier {0}")]
    DuplicateId(ItemId),
    #[error("action order must list every agent exactly once")]
    ActionOrderMismatch,
    #[error("unknown agent {0}")]
    UnknownAgent(ItemId),
    #[error("element {element} references undeclared distribution `{name}`")]
    UnknownDistribution { element: ItemId, name: String },
    #[error("distribution `{name}` is {found}x{found}, world is {expected}x{expected}")]
    DistributionSize { name: String, expected: usize, found: usize },
    #[error("vision angle {0} outside [0, 360]")]
    VisionAngle(f64),
    #[error("vision range {0} must be positive, or -1 for unlimited")]
    VisionRange(f64),
    #[error("{0}")]
    Shape(#[from] ShapeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error("shape matrix is empty")]
    Empty,
    #[error("shape matrix rows differ in length")]
    Ragged,
    #[error("shape anchor cell ({row}, {col}) must be set")]
    AnchorUnset { row: usize, col: usize },
}

/// A probability distribution matrix that cannot be normalised.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum PdmError {
    #[error("distribution must be square, got {rows} rows and a row of {cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("distribution is empty")]
    Empty,
    #[error("weight at ({row}, {col}) is negative or not finite")]
    InvalidWeight { row: usize, col: usize },
    #[error("distribution has no positive weight")]
    NoSupport,
}

/// No unclaimed cell with positive weight remained for an element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("no admissible cell left for {}", match .element { Some(id) => alloc::format!("element {id}"), None => String::from("draw") })]
pub struct PlacementError {
    pub element: Option<ItemId>,
}

/// An operation was invoked on a world in the wrong lifecycle state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum StateError {
    #[error("world has not been generated")]
    NotGenerated,
    #[error("episode has terminated; regenerate the world first")]
    Terminated,
    #[error("no agent with id {0}")]
    UnknownAgent(ItemId),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Pdm(#[from] PdmError),
    #[error(transparent)]
    Placement(#[from] PlacementError),
    #[error(transparent)]
    State(#[from] StateError),
}
