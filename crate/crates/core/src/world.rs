//! World configuration, registered elements and the episode lifecycle.

use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::dynamics::RewardScheme;
use crate::error::{ConfigError, Error, PlacementError, StateError};
use crate::grid::{Grid, GridPosition, Orientation};
use crate::placement::{self, ElementClass, Pdm, PlacementRequest, ShapeMatrix};
use crate::rng::SimRng;
use crate::vision::VisionParams;

/// Identifier of any registered element. Unique across agents, foods and obstacles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItemId(pub u32);

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MaxSteps {
    Limited(u64),
    #[default]
    Unlimited,
}

impl MaxSteps {
    pub fn reached(self, steps: u64) -> bool {
        matches!(self, MaxSteps::Limited(n) if steps >= n)
    }
}

#[derive(Clone, Debug)]
pub struct WorldConfig {
    pub world_size: usize,
    pub max_steps: MaxSteps,
    pub reward_scheme: RewardScheme,
    /// Agents act in this order within a step.
    pub action_order: Vec<ItemId>,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ObstacleKind {
    Wall,
    Water,
}

impl ObstacleKind {
    /// Both kinds block movement; only walls block sight.
    pub fn blocks_vision(self) -> bool {
        matches!(self, ObstacleKind::Wall)
    }
}

/// Which distribution an element spawns from.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum PdmRef {
    #[default]
    Uniform,
    Named(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct AgentAttributes {
    pub power: i32,
    pub transparent: bool,
    pub vision: VisionParams,
    /// Facing at the start of every episode.
    pub orientation: Orientation,
}

impl Default for AgentAttributes {
    fn default() -> Self {
        Self { power: 1, transparent: false, vision: VisionParams::default(), orientation: Orientation::North }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ElementKind {
    Agent(AgentAttributes),
    Food,
    Obstacle { kind: ObstacleKind, shape: ShapeMatrix },
}

/// Registration record for one element.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementSpec {
    pub id: ItemId,
    pub pdm: PdmRef,
    pub kind: ElementKind,
}

impl ElementSpec {
    pub fn agent(id: ItemId, attributes: AgentAttributes, pdm: PdmRef) -> Self {
        Self { id, pdm, kind: ElementKind::Agent(attributes) }
    }

    pub fn food(id: ItemId, pdm: PdmRef) -> Self {
        Self { id, pdm, kind: ElementKind::Food }
    }

    pub fn obstacle(id: ItemId, kind: ObstacleKind, shape: ShapeMatrix, pdm: PdmRef) -> Self {
        Self { id, pdm, kind: ElementKind::Obstacle { kind, shape } }
    }

    pub fn class(&self) -> ElementClass {
        match self.kind {
            ElementKind::Agent(_) => ElementClass::Agent,
            ElementKind::Food => ElementClass::Food,
            ElementKind::Obstacle { .. } => ElementClass::Obstacle,
        }
    }
}

/// Named spawn distributions available to element specs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DistributionSet(BTreeMap<String, Pdm>);

impl DistributionSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, pdm: Pdm) -> Option<Pdm> {
        self.0.insert(name.into(), pdm)
    }

    pub fn get(&self, name: &str) -> Option<&Pdm> {
        self.0.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Pdm)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AgentBody {
    pub id: ItemId,
    pub position: GridPosition,
    pub orientation: Orientation,
    pub power: i32,
    pub transparent: bool,
    pub vision: VisionParams,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Food {
    pub id: ItemId,
    pub position: GridPosition,
    pub consumed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obstacle {
    pub id: ItemId,
    pub kind: ObstacleKind,
    pub shape: ShapeMatrix,
    pub center: GridPosition,
    /// Claimed cells after clipping and priority resolution; contains `center`.
    pub occupied_cells: Vec<GridPosition>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum TerminationCause {
    #[default]
    None,
    MaxSteps,
    AllFoodConsumed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct TerminationStatus {
    pub terminated: bool,
    pub cause: TerminationCause,
}

impl TerminationStatus {
    pub const RUNNING: Self = Self { terminated: false, cause: TerminationCause::None };

    pub fn from_cause(cause: TerminationCause) -> Self {
        Self { terminated: cause != TerminationCause::None, cause }
    }
}

/// What stands on a cell. Indices point into the world's element vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub(crate) enum Cell {
    #[default]
    Empty,
    Agent(u32),
    Food(u32),
    Obstacle(u32),
}

/// The authoritative simulation state.
#[derive(Clone, Debug)]
pub struct World {
    pub(crate) config: WorldConfig,
    distributions: DistributionSet,
    specs: Vec<ElementSpec>,
    pub(crate) agents: Vec<AgentBody>,
    pub(crate) foods: Vec<Food>,
    pub(crate) obstacles: Vec<Obstacle>,
    agent_slots: BTreeMap<ItemId, usize>,
    /// `config.action_order` resolved to agent indices.
    pub(crate) order: Vec<usize>,
    pub(crate) cells: Grid<Cell>,
    pub(crate) step_count: u64,
    pub(crate) status: TerminationStatus,
    generated: bool,
    pub(crate) rng: SimRng,
}

/// Validates configuration and registers elements. Nothing is placed until
/// [`World::generate`] runs.
pub fn create_world(
    config: WorldConfig,
    distributions: DistributionSet,
    elements: Vec<ElementSpec>,
) -> Result<World, ConfigError> {
    World::new(config, distributions, elements)
}

impl World {
    pub fn new(
        config: WorldConfig,
        distributions: DistributionSet,
        elements: Vec<ElementSpec>,
    ) -> Result<Self, ConfigError> {
        let n = config.world_size;
        if n == 0 {
            return Err(ConfigError::EmptyWorld);
        }
        if config.max_steps == MaxSteps::Limited(0) {
            return Err(ConfigError::ZeroMaxSteps);
        }
        for (name, pdm) in distributions.iter() {
            if pdm.size() != n {
                return Err(ConfigError::DistributionSize {
                    name: name.into(),
                    expected: n,
                    found: pdm.size(),
                });
            }
        }

        let mut seen = BTreeSet::new();
        let mut agents = Vec::new();
        let mut foods = Vec::new();
        let mut obstacles = Vec::new();
        let mut agent_slots = BTreeMap::new();
        for spec in &elements {
            if !seen.insert(spec.id) {
                return Err(ConfigError::DuplicateId(spec.id));
            }
            if let PdmRef::Named(name) = &spec.pdm {
                if distributions.get(name).is_none() {
                    return Err(ConfigError::UnknownDistribution { element: spec.id, name: name.clone() });
                }
            }
            match &spec.kind {
                ElementKind::Agent(attrs) => {
                    attrs.vision.validate()?;
                    agent_slots.insert(spec.id, agents.len());
                    agents.push(AgentBody {
                        id: spec.id,
                        position: GridPosition::default(),
                        orientation: attrs.orientation,
                        power: attrs.power,
                        transparent: attrs.transparent,
                        vision: attrs.vision,
                    });
                }
                ElementKind::Food => {
                    foods.push(Food { id: spec.id, position: GridPosition::default(), consumed: false })
                }
                ElementKind::Obstacle { kind, shape } => obstacles.push(Obstacle {
                    id: spec.id,
                    kind: *kind,
                    shape: shape.clone(),
                    center: GridPosition::default(),
                    occupied_cells: Vec::new(),
                }),
            }
        }

        if config.action_order.len() != agents.len() {
            return Err(ConfigError::ActionOrderMismatch);
        }
        let mut order = Vec::with_capacity(agents.len());
        for id in &config.action_order {
            let slot = *agent_slots.get(id).ok_or(ConfigError::ActionOrderMismatch)?;
            if order.contains(&slot) {
                return Err(ConfigError::ActionOrderMismatch);
            }
            order.push(slot);
        }

        let rng = SimRng::from_seed(config.seed);
        Ok(Self {
            cells: Grid::filled(n, Cell::Empty),
            config,
            distributions,
            specs: elements,
            agents,
            foods,
            obstacles,
            agent_slots,
            order,
            step_count: 0,
            status: TerminationStatus::RUNNING,
            generated: false,
            rng,
        })
    }

    /// Starts a new episode: samples every element's position, resets the
    /// step counter, termination and food state. Registered elements are
    /// never added or removed. On error the world is left ungenerated.
    pub fn generate(&mut self) -> Result<(), PlacementError> {
        let n = self.config.world_size;
        self.generated = false;
        let uniform = Pdm::uniform(n);
        let requests: Vec<PlacementRequest<'_>> = self
            .specs
            .iter()
            .map(|spec| PlacementRequest {
                element: spec.id,
                class: spec.class(),
                pdm: match &spec.pdm {
                    PdmRef::Uniform => &uniform,
                    PdmRef::Named(name) => self.distributions.get(name).expect("validated at construction"),
                },
                shape: match &spec.kind {
                    ElementKind::Obstacle { shape, .. } => Some(shape),
                    _ => None,
                },
            })
            .collect();
        let placed = placement::place_all(n, &requests, &mut self.rng)?;

        self.cells.fill(Cell::Empty);
        let (mut a, mut f, mut o) = (0usize, 0usize, 0usize);
        for (p, spec) in placed.into_iter().zip(self.specs.iter().filter(|s| s.class() == ElementClass::Agent)
            .chain(self.specs.iter().filter(|s| s.class() == ElementClass::Food))
            .chain(self.specs.iter().filter(|s| s.class() == ElementClass::Obstacle)))
        {
            debug_assert_eq!(p.element, spec.id);
            match &spec.kind {
                ElementKind::Agent(attrs) => {
                    let body = &mut self.agents[a];
                    body.position = p.center;
                    body.orientation = attrs.orientation;
                    self.cells.set(p.center, Cell::Agent(a as u32));
                    a += 1;
                }
                ElementKind::Food => {
                    let food = &mut self.foods[f];
                    food.position = p.center;
                    food.consumed = false;
                    self.cells.set(p.center, Cell::Food(f as u32));
                    f += 1;
                }
                ElementKind::Obstacle { .. } => {
                    for &c in &p.cells {
                        self.cells.set(c, Cell::Obstacle(o as u32));
                    }
                    let obs = &mut self.obstacles[o];
                    obs.center = p.center;
                    obs.occupied_cells = p.cells;
                    o += 1;
                }
            }
        }
        self.step_count = 0;
        self.status = TerminationStatus::RUNNING;
        self.generated = true;
        Ok(())
    }

    /// Replaces the generator state as if the world had been created with `seed`.
    pub fn reseed(&mut self, seed: u64) {
        self.config.seed = seed;
        self.rng = SimRng::from_seed(seed);
    }

    /// Pure: "max steps" wins over "all food consumed" when both hold.
    /// A world without registered food never ends by consumption.
    pub fn check_termination(&self) -> TerminationStatus {
        let cause = if self.config.max_steps.reached(self.step_count) {
            TerminationCause::MaxSteps
        } else if !self.foods.is_empty() && self.foods.iter().all(|f| f.consumed) {
            TerminationCause::AllFoodConsumed
        } else {
            TerminationCause::None
        };
        TerminationStatus::from_cause(cause)
    }

    pub fn config(&self) -> &WorldConfig {
        &self.config
    }

    pub fn size(&self) -> usize {
        self.config.world_size
    }

    pub fn is_generated(&self) -> bool {
        self.generated
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn status(&self) -> TerminationStatus {
        self.status
    }

    pub fn is_terminated(&self) -> bool {
        self.status.terminated
    }

    pub fn rng(&self) -> &SimRng {
        &self.rng
    }

    /// Controllers draw from the world generator so that one seed fixes a whole run.
    pub fn rng_mut(&mut self) -> &mut SimRng {
        &mut self.rng
    }

    pub fn specs(&self) -> &[ElementSpec] {
        &self.specs
    }

    pub fn distributions(&self) -> &DistributionSet {
        &self.distributions
    }

    /// In registration order.
    pub fn agents(&self) -> &[AgentBody] {
        &self.agents
    }

    pub fn foods(&self) -> &[Food] {
        &self.foods
    }

    pub fn obstacles(&self) -> &[Obstacle] {
        &self.obstacles
    }

    pub fn action_order(&self) -> &[ItemId] {
        &self.config.action_order
    }

    pub fn agent(&self, id: ItemId) -> Option<&AgentBody> {
        self.agent_slots.get(&id).map(|&i| &self.agents[i])
    }

    pub(crate) fn agent_slot(&self, id: ItemId) -> Option<usize> {
        self.agent_slots.get(&id).copied()
    }

    pub(crate) fn placed_agent_slot(&self, id: ItemId) -> Result<usize, StateError> {
        let slot = self.agent_slot(id).ok_or(StateError::UnknownAgent(id))?;
        if !self.generated {
            return Err(StateError::NotGenerated);
        }
        Ok(slot)
    }

    /// Agent standing on `pos`, if any.
    pub fn agent_at(&self, pos: GridPosition) -> Option<&AgentBody> {
        match *self.cells.get(pos) {
            Cell::Agent(i) => Some(&self.agents[i as usize]),
            _ => None,
        }
    }

    /// Unconsumed food on `pos`, if any.
    pub fn food_at(&self, pos: GridPosition) -> Option<&Food> {
        match *self.cells.get(pos) {
            Cell::Food(i) => Some(&self.foods[i as usize]),
            _ => None,
        }
    }

    pub fn obstacle_at(&self, pos: GridPosition) -> Option<&Obstacle> {
        match *self.cells.get(pos) {
            Cell::Obstacle(i) => Some(&self.obstacles[i as usize]),
            _ => None,
        }
    }

    /// Moves an agent onto a free cell and sets its facing, outside the
    /// normal dynamics. Intended for scripted set-ups and tests.
    pub fn set_agent_pose(
        &mut self,
        id: ItemId,
        position: GridPosition,
        orientation: Orientation,
    ) -> Result<(), Error> {
        let slot = self.placed_agent_slot(id)?;
        if !position.in_bounds(self.size()) {
            return Err(StateError::UnknownAgent(id).into());
        }
        let here = self.agents[slot].position;
        match *self.cells.get(position) {
            Cell::Empty => {}
            Cell::Agent(i) if i as usize == slot => {}
            _ => return Err(PlacementError { element: Some(id) }.into()),
        }
        self.cells.set(here, Cell::Empty);
        self.cells.set(position, Cell::Agent(slot as u32));
        let body = &mut self.agents[slot];
        body.position = position;
        body.orientation = orientation;
        Ok(())
    }

    /// Opacity of every cell for sight lines: walls and non-transparent agents.
    pub fn opacity(&self) -> Grid<bool> {
        let mut grid = Grid::filled(self.size(), false);
        self.fill_opacity(grid.as_mut_slice());
        grid
    }

    pub(crate) fn fill_opacity(&self, out: &mut [bool]) {
        for (o, cell) in out.iter_mut().zip(self.cells.as_slice()) {
            *o = match *cell {
                Cell::Obstacle(i) => self.obstacles[i as usize].kind.blocks_vision(),
                Cell::Agent(i) => !self.agents[i as usize].transparent,
                Cell::Empty | Cell::Food(_) => false,
            };
        }
    }
}
