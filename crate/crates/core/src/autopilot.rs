//! Built-in controllers: a uniform random walker and an A* forager that
//! remembers what it has seen.

use alloc::collections::{BinaryHeap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::dynamics::{Action, StepEvent};
use crate::grid::{GridPosition, Orientation};
use crate::rng::SimRng;
use crate::vision::{Observation, VisionMode};
use crate::world::ItemId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Knowledge {
    #[default]
    Unknown,
    Free,
    ObstacleKnown,
    FoodKnown,
}

/// Incremental memory of the board.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnownMap {
    size: usize,
    cells: Vec<Knowledge>,
    last_seen: Vec<Option<u64>>,
}

impl KnownMap {
    pub fn new(size: usize) -> Self {
        Self { size, cells: vec![Knowledge::Unknown; size * size], last_seen: vec![None; size * size] }
    }

    /// A fully known map from a traversability predicate; blocked cells are `ObstacleKnown`.
    pub fn from_passable(size: usize, passable: impl Fn(GridPosition) -> bool) -> Self {
        let mut map = Self::new(size);
        for i in 0..size * size {
            let p = GridPosition::from_index(i, size);
            map.cells[i] = if passable(p) { Knowledge::Free } else { Knowledge::ObstacleKnown };
        }
        map
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, pos: GridPosition) -> Knowledge {
        self.cells[pos.index(self.size)]
    }

    pub fn set(&mut self, pos: GridPosition, k: Knowledge) {
        self.cells[pos.index(self.size)] = k;
    }

    pub fn last_seen(&self, pos: GridPosition) -> Option<u64> {
        self.last_seen[pos.index(self.size)]
    }

    /// Unknown cells count as passable for planning.
    #[inline]
    pub fn passable(&self, pos: GridPosition) -> bool {
        self.cells[pos.index(self.size)] != Knowledge::ObstacleKnown
    }

    pub fn mark_obstacle(&mut self, pos: GridPosition) {
        self.set(pos, Knowledge::ObstacleKnown);
    }

    pub fn count(&self, k: Knowledge) -> usize {
        self.cells.iter().filter(|&&c| c == k).count()
    }

    /// Cells holding `k`, in row-major order.
    pub fn cells_with(&self, k: Knowledge) -> impl Iterator<Item = GridPosition> + '_ {
        let size = self.size;
        self.cells.iter().enumerate().filter(move |(_, &c)| c == k).map(move |(i, _)| GridPosition::from_index(i, size))
    }

    /// Folds in an allocentric observation seen at `step`.
    pub fn update(&mut self, obs: &Observation, step: u64) {
        debug_assert_eq!(obs.frame, VisionMode::Allocentric);
        debug_assert_eq!(obs.side, self.size);
        for i in 0..self.cells.len() {
            if obs.observability[i] == 0 {
                continue;
            }
            self.last_seen[i] = Some(step);
            self.cells[i] = if obs.food[i] != 0 {
                Knowledge::FoodKnown
            } else if self.cells[i] == Knowledge::ObstacleKnown {
                Knowledge::ObstacleKnown
            } else {
                Knowledge::Free
            };
        }
    }
}

pub fn update_known_map(known: &mut KnownMap, obs: &Observation, step: u64) {
    known.update(obs, step);
}

/// Shortest 4-connected path from `start` to `goal` over cells not known to
/// be obstacles, with unit costs and a Manhattan heuristic. The path excludes
/// `start` and ends at `goal`; `start == goal` yields an empty path.
/// Neighbours expand north, south, east, west; equal priorities pop first-in first.
pub fn a_star(known: &KnownMap, start: GridPosition, goal: GridPosition) -> Option<Vec<GridPosition>> {
    let n = known.size();
    if start == goal {
        return Some(Vec::new());
    }
    if !known.passable(goal) {
        return None;
    }
    let (s, g) = (start.index(n), goal.index(n));
    let mut best = vec![u32::MAX; n * n];
    let mut parent = vec![usize::MAX; n * n];
    let mut closed = vec![false; n * n];
    let mut open = BinaryHeap::new();
    let mut seq = 0u64;
    best[s] = 0;
    open.push(Reverse((start.manhattan(goal) as u32, seq, s)));
    while let Some(Reverse((_, _, i))) = open.pop() {
        if closed[i] {
            continue;
        }
        if i == g {
            let mut path = Vec::with_capacity(best[g] as usize);
            let mut at = g;
            while at != s {
                path.push(GridPosition::from_index(at, n));
                at = parent[at];
            }
            path.reverse();
            return Some(path);
        }
        closed[i] = true;
        let here = GridPosition::from_index(i, n);
        for d in Orientation::ALL {
            let Some(next) = here.step(d, n) else { continue };
            let j = next.index(n);
            if closed[j] || !known.passable(next) {
                continue;
            }
            let cost = best[i] + 1;
            if cost < best[j] {
                best[j] = cost;
                parent[j] = i;
                seq += 1;
                open.push(Reverse((cost + next.manhattan(goal) as u32, seq, j)));
            }
        }
    }
    None
}

/// Every cell reachable from `start` over passable cells, as a bitmap.
fn reachable(known: &KnownMap, start: GridPosition) -> Vec<bool> {
    let n = known.size();
    let mut seen = vec![false; n * n];
    let mut queue = VecDeque::new();
    seen[start.index(n)] = true;
    queue.push_back(start);
    while let Some(p) = queue.pop_front() {
        for d in Orientation::ALL {
            if let Some(q) = p.step(d, n) {
                let j = q.index(n);
                if !seen[j] && known.passable(q) {
                    seen[j] = true;
                    queue.push_back(q);
                }
            }
        }
    }
    seen
}

/// One of the nine primitives, uniformly, from a single draw.
pub fn random_walker(rng: &mut SimRng) -> Action {
    Action::PRIMITIVES[rng.below(9) as usize]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Pose {
    pub position: GridPosition,
    pub orientation: Orientation,
}

/// What happened to an agent's own move during the previous step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Outcome {
    #[default]
    None,
    Blocked,
    Collided,
    Ate,
}

impl Outcome {
    pub fn from_events(agent: ItemId, events: &[StepEvent]) -> Self {
        for e in events {
            match *e {
                StepEvent::BlockedByObstacle { agent: a } if a == agent => return Outcome::Blocked,
                StepEvent::Collision { mover, .. } if mover == agent => return Outcome::Collided,
                StepEvent::FoodConsumed { agent: a, .. } if a == agent => return Outcome::Ate,
                _ => {}
            }
        }
        Outcome::None
    }
}

/// Everything a controller may look at when choosing an action.
#[derive(Clone, Copy, Debug)]
pub struct ControllerInput<'a> {
    /// Allocentric, regardless of the agent's configured frame.
    pub observation: &'a Observation,
    pub pose: Pose,
    pub outcome: Outcome,
    pub step: u64,
}

pub trait Controller {
    fn act(&mut self, input: &ControllerInput<'_>, rng: &mut SimRng) -> Action;
    /// Called at the start of every episode.
    fn reset(&mut self, world_size: usize);
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RandomWalker;

impl Controller for RandomWalker {
    fn act(&mut self, _: &ControllerInput<'_>, rng: &mut SimRng) -> Action {
        random_walker(rng)
    }

    fn reset(&mut self, _: usize) {}
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Idle;

impl Controller for Idle {
    fn act(&mut self, _: &ControllerInput<'_>, _: &mut SimRng) -> Action {
        Action::NoOp
    }

    fn reset(&mut self, _: usize) {}
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TargetKind {
    Food,
    Explore,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutopilotState {
    pub known: KnownMap,
    pub current_target: Option<GridPosition>,
    pub target_kind: Option<TargetKind>,
    /// From the cell next to the agent up to and including the target.
    pub planned_path: Option<Vec<GridPosition>>,
    /// Cell the last emitted move aimed at.
    pending_move: Option<GridPosition>,
}

impl AutopilotState {
    pub fn new(size: usize) -> Self {
        Self { known: KnownMap::new(size), current_target: None, target_kind: None, planned_path: None, pending_move: None }
    }
}

/// One decision of the forager.
///
/// Known food wins: the closest by path length (row-major on ties) becomes
/// the target. Otherwise an exploration target is kept while it is still
/// unknown and reachable, and redrawn uniformly from the reachable unknown
/// cells when it is not. The agent then looks and moves towards the first
/// cell of a fresh A* path, or idles when there is nowhere to go.
pub fn algorithmic_policy(state: &mut AutopilotState, input: &ControllerInput<'_>, rng: &mut SimRng) -> Action {
    let here = input.pose.position;
    state.known.update(input.observation, input.step);
    if input.outcome == Outcome::Blocked {
        if let Some(cell) = state.pending_move {
            state.known.mark_obstacle(cell);
        }
    }
    state.pending_move = None;
    state.planned_path = None;

    let mut plan: Option<(GridPosition, Vec<GridPosition>)> = None;
    for food in state.known.cells_with(Knowledge::FoodKnown) {
        if let Some(path) = a_star(&state.known, here, food) {
            if plan.as_ref().is_none_or(|(_, best)| path.len() < best.len()) {
                plan = Some((food, path));
            }
        }
    }
    if let Some((food, path)) = plan {
        state.current_target = Some(food);
        state.target_kind = Some(TargetKind::Food);
        return state.follow(here, path);
    }

    if state.target_kind != Some(TargetKind::Explore) {
        state.current_target = None;
    }
    if let Some(t) = state.current_target {
        if state.known.get(t) == Knowledge::Unknown {
            if let Some(path) = a_star(&state.known, here, t) {
                return state.follow(here, path);
            }
        }
    }
    let reach = reachable(&state.known, here);
    let frontier: Vec<GridPosition> =
        state.known.cells_with(Knowledge::Unknown).filter(|p| reach[p.index(state.known.size())]).collect();
    if frontier.is_empty() {
        state.current_target = None;
        state.target_kind = None;
        return Action::NoOp;
    }
    let t = frontier[rng.below(frontier.len() as u64) as usize];
    state.current_target = Some(t);
    state.target_kind = Some(TargetKind::Explore);
    let path = a_star(&state.known, here, t).expect("target drawn from the reachable set");
    state.follow(here, path)
}

impl AutopilotState {
    fn follow(&mut self, here: GridPosition, path: Vec<GridPosition>) -> Action {
        let Some(&next) = path.first() else {
            return Action::NoOp;
        };
        let dir = here.direction_to(next).expect("paths are 4-connected");
        self.pending_move = Some(next);
        self.planned_path = Some(path);
        Action::Composite { look: dir, step: dir }
    }
}

/// Controller wrapper around [`algorithmic_policy`].
#[derive(Clone, Debug)]
pub struct AstarForager {
    state: AutopilotState,
}

impl AstarForager {
    pub fn new(size: usize) -> Self {
        Self { state: AutopilotState::new(size) }
    }

    pub fn state(&self) -> &AutopilotState {
        &self.state
    }
}

impl Controller for AstarForager {
    fn act(&mut self, input: &ControllerInput<'_>, rng: &mut SimRng) -> Action {
        algorithmic_policy(&mut self.state, input, rng)
    }

    fn reset(&mut self, world_size: usize) {
        self.state = AutopilotState::new(world_size);
    }
}
