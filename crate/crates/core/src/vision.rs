//! Field of view and observation assembly.
//!
//! Visibility is computed by shadow casting over four quadrants (north, south,
//! east, west of the viewer), each scanned row by row outward with exact
//! rational slopes. In a quadrant's local frame a cell at depth `d` and
//! lateral offset `c` spans slopes `[(2c-1)/2d, (2c+1)/2d]` on its centre
//! line; an opaque cell removes that closed interval from every deeper row.
//! A cell, opaque or not, is visible when some surviving ray touches its
//! span, so walls are seen while what lies behind them is not. Angle and
//! range limits are then applied to cell centres.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{ConfigError, StateError};
use crate::grid::{Grid, GridPosition, Orientation};
use crate::world::{ItemId, World};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum VisionMode {
    #[default]
    Allocentric,
    Egocentric,
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum VisionRange {
    #[default]
    Infinite,
    Limited(f64),
}

impl VisionRange {
    /// Interface form: `-1` means unlimited, anything else must be positive.
    pub fn from_limit(limit: f64) -> Result<Self, ConfigError> {
        if limit == -1.0 {
            Ok(VisionRange::Infinite)
        } else if limit.is_finite() && limit > 0.0 {
            Ok(VisionRange::Limited(limit))
        } else {
            Err(ConfigError::VisionRange(limit))
        }
    }

    pub fn as_limit(self) -> f64 {
        match self {
            VisionRange::Infinite => -1.0,
            VisionRange::Limited(r) => r,
        }
    }

    #[inline]
    fn admits(self, drow: i64, dcol: i64) -> bool {
        match self {
            VisionRange::Infinite => true,
            VisionRange::Limited(r) => ((drow * drow + dcol * dcol) as f64) <= r * r,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VisionParams {
    pub mode: VisionMode,
    /// Full width of the view cone, in degrees.
    pub angle_deg: f64,
    pub range: VisionRange,
}

impl Default for VisionParams {
    fn default() -> Self {
        Self { mode: VisionMode::Allocentric, angle_deg: 360.0, range: VisionRange::Infinite }
    }
}

impl VisionParams {
    pub fn new(mode: VisionMode, angle_deg: f64, range: VisionRange) -> Result<Self, ConfigError> {
        let p = Self { mode, angle_deg, range };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(0.0..=360.0).contains(&self.angle_deg) {
            return Err(ConfigError::VisionAngle(self.angle_deg));
        }
        if let VisionRange::Limited(r) = self.range {
            if !(r.is_finite() && r > 0.0) {
                return Err(ConfigError::VisionRange(r));
            }
        }
        Ok(())
    }

    /// Angle predicate on a cell centre offset. The viewer's own cell always
    /// passes; `0` admits nothing else, `360` admits everything, and cells
    /// exactly on the cone edge are inside.
    pub fn admits_angle(&self, drow: i64, dcol: i64, facing: Orientation) -> bool {
        if drow == 0 && dcol == 0 || self.angle_deg >= 360.0 {
            return true;
        }
        if self.angle_deg <= 0.0 {
            return false;
        }
        let (fx, fy) = facing.vector();
        let (vx, vy) = (dcol, -drow);
        let dot = vx * fx + vy * fy;
        let cross = vx * fy - vy * fx;
        let theta = libm::atan2(cross.abs() as f64, dot as f64) * (180.0 / core::f64::consts::PI);
        theta <= self.angle_deg / 2.0 + 1e-9
    }

    #[inline]
    pub fn admits(&self, drow: i64, dcol: i64, facing: Orientation) -> bool {
        self.range.admits(drow, dcol) && self.admits_angle(drow, dcol, facing)
    }
}

/// Cells an agent currently sees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VisibilityMask(Grid<bool>);

impl VisibilityMask {
    pub fn empty(size: usize) -> Self {
        Self(Grid::filled(size, false))
    }

    pub fn full(size: usize) -> Self {
        Self(Grid::filled(size, true))
    }

    pub fn size(&self) -> usize {
        self.0.size()
    }

    #[inline]
    pub fn is_visible(&self, pos: GridPosition) -> bool {
        *self.0.get(pos)
    }

    pub fn count(&self) -> usize {
        self.0.as_slice().iter().filter(|&&v| v).count()
    }

    pub fn grid(&self) -> &Grid<bool> {
        &self.0
    }

    pub fn as_slice(&self) -> &[bool] {
        self.0.as_slice()
    }
}

// Invariant: den > 0.
#[derive(Clone, Copy, Debug)]
struct Slope {
    num: i64,
    den: i64,
}

impl PartialEq for Slope {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Slope {}

impl PartialOrd for Slope {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Slope {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

#[derive(Clone, Copy, Debug)]
struct Bound {
    at: Slope,
    closed: bool,
}

/// A run of surviving slopes with open or closed ends.
#[derive(Clone, Copy, Debug)]
struct SlopeRun {
    lo: Bound,
    hi: Bound,
}

impl SlopeRun {
    fn is_empty(&self) -> bool {
        match self.lo.at.cmp(&self.hi.at) {
            Ordering::Less => false,
            Ordering::Equal => !(self.lo.closed && self.hi.closed),
            Ordering::Greater => true,
        }
    }

    fn above_lo(&self, s: Slope) -> bool {
        match s.cmp(&self.lo.at) {
            Ordering::Greater => true,
            Ordering::Equal => self.lo.closed,
            Ordering::Less => false,
        }
    }

    fn below_hi(&self, s: Slope) -> bool {
        match s.cmp(&self.hi.at) {
            Ordering::Less => true,
            Ordering::Equal => self.hi.closed,
            Ordering::Greater => false,
        }
    }

    /// Whether the closed span `[from, to]` meets this run.
    fn touches(&self, from: Slope, to: Slope) -> bool {
        self.above_lo(to) && self.below_hi(from)
    }
}

fn floor_div(a: i64, b: i64) -> i64 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) { q - 1 } else { q }
}

/// Quadrant-local `(depth, lateral)` to board offset `(drow, dcol)`.
type Quadrant = fn(i64, i64) -> (i64, i64);

const QUADRANTS: [Quadrant; 4] = [
    |d, c| (-d, c),
    |d, c| (d, c),
    |d, c| (c, d),
    |d, c| (c, -d),
];

/// Reusable scratch space for [`field_of_view_into`].
#[derive(Default)]
pub struct FovScratch {
    stack: Vec<(i64, SlopeRun)>,
}

/// Shadow-cast field of view from `origin` over an opacity grid.
pub fn field_of_view(
    opaque: &Grid<bool>,
    origin: GridPosition,
    facing: Orientation,
    params: &VisionParams,
) -> VisibilityMask {
    let mut mask = VisibilityMask::empty(opaque.size());
    field_of_view_into(opaque.as_slice(), opaque.size(), origin, facing, params, &mut FovScratch::default(), &mut mask);
    mask
}

/// As [`field_of_view`], writing into `mask` (which is cleared first).
pub fn field_of_view_into(
    opaque: &[bool],
    size: usize,
    origin: GridPosition,
    facing: Orientation,
    params: &VisionParams,
    scratch: &mut FovScratch,
    mask: &mut VisibilityMask,
) {
    debug_assert_eq!(opaque.len(), size * size);
    debug_assert_eq!(mask.size(), size);
    let cells = mask.0.as_mut_slice();
    cells.iter_mut().for_each(|c| *c = false);
    cells[origin.index(size)] = true;
    if params.angle_deg <= 0.0 {
        return;
    }

    let n = size as i64;
    let (or, oc) = (origin.row as i64, origin.col as i64);
    let max_depth = match params.range {
        VisionRange::Infinite => n,
        VisionRange::Limited(r) => (libm::floor(r) as i64).min(n),
    };
    let full = SlopeRun {
        lo: Bound { at: Slope { num: -1, den: 1 }, closed: true },
        hi: Bound { at: Slope { num: 1, den: 1 }, closed: true },
    };

    for to_board in QUADRANTS {
        let stack = &mut scratch.stack;
        stack.clear();
        stack.push((1, full));
        while let Some((depth, arc)) = stack.pop() {
            if depth > max_depth {
                continue;
            }
            // the row's own axis coordinate is shared by every lateral offset
            let (ar, ac) = to_board(depth, 0);
            let (row_r, row_c) = (or + ar, oc + ac);
            let axis_out = if ar != 0 { !(0..n).contains(&row_r) } else { !(0..n).contains(&row_c) };
            if axis_out {
                continue;
            }

            let first = (floor_div(arc.lo.at.num * depth, arc.lo.at.den) - 1).max(-depth);
            let last = (floor_div(arc.hi.at.num * depth, arc.hi.at.den) + 2).min(depth);
            let mut cursor = arc.lo;
            for lateral in first..=last {
                let span_lo = Slope { num: 2 * lateral - 1, den: 2 * depth };
                let span_hi = Slope { num: 2 * lateral + 1, den: 2 * depth };
                if !arc.touches(span_lo, span_hi) {
                    continue;
                }
                let (dr, dc) = to_board(depth, lateral);
                let (r, c) = (or + dr, oc + dc);
                if !(0..n).contains(&r) || !(0..n).contains(&c) {
                    continue;
                }
                let idx = (r * n + c) as usize;
                if opaque[idx] {
                    if params.admits(dr, dc, facing) {
                        cells[idx] = true;
                    }
                    let piece = SlopeRun { lo: cursor, hi: Bound { at: span_lo, closed: false } };
                    if !piece.is_empty() {
                        stack.push((depth + 1, piece));
                    }
                    cursor = Bound { at: span_hi, closed: false };
                } else if params.admits(dr, dc, facing) {
                    cells[idx] = true;
                }
            }
            let rest = SlopeRun { lo: cursor, hi: arc.hi };
            if !rest.is_empty() {
                stack.push((depth + 1, rest));
            }
        }
    }
}

/// One observation layer or vector, as listed in [`Observation::manifest`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    Observability,
    Food,
    SelfPosition,
    SelfOrientation,
    OtherPosition(ItemId),
    OtherOrientation(ItemId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OtherAgentView {
    pub id: ItemId,
    /// All zeros unless the agent is inside the observer's visibility mask.
    pub position: Vec<u8>,
    pub orientation: [u8; 4],
}

/// Per-agent observation. 2D layers are row-major `side × side` bytes where
/// `side` is N (allocentric) or 2N−1 (egocentric).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Observation {
    pub frame: VisionMode,
    pub side: usize,
    pub observability: Vec<u8>,
    pub food: Vec<u8>,
    pub self_position: Vec<u8>,
    pub self_orientation: [u8; 4],
    /// Every other agent, in action order.
    pub others: Vec<OtherAgentView>,
}

impl Observation {
    /// Field order and shapes of [`Observation::flatten`].
    pub fn manifest(&self) -> Vec<(Field, Vec<usize>)> {
        let layer = vec![self.side, self.side];
        let mut out = vec![
            (Field::Observability, layer.clone()),
            (Field::Food, layer.clone()),
            (Field::SelfPosition, layer.clone()),
            (Field::SelfOrientation, vec![4]),
        ];
        for o in &self.others {
            out.push((Field::OtherPosition(o.id), layer.clone()));
            out.push((Field::OtherOrientation(o.id), vec![4]));
        }
        out
    }

    /// All fields concatenated in manifest order.
    pub fn flatten(&self) -> Vec<u8> {
        let layer = self.side * self.side;
        let mut out = Vec::with_capacity((3 + self.others.len()) * layer + 4 * (1 + self.others.len()));
        out.extend_from_slice(&self.observability);
        out.extend_from_slice(&self.food);
        out.extend_from_slice(&self.self_position);
        out.extend_from_slice(&self.self_orientation);
        for o in &self.others {
            out.extend_from_slice(&o.position);
            out.extend_from_slice(&o.orientation);
        }
        out
    }

    pub fn other(&self, id: ItemId) -> Option<&OtherAgentView> {
        self.others.iter().find(|o| o.id == id)
    }

    #[inline]
    pub fn at(layer: &[u8], side: usize, row: usize, col: usize) -> u8 {
        layer[row * side + col]
    }
}

/// Visibility of one agent against the current state.
pub fn compute_visibility(world: &World, agent: ItemId) -> Result<VisibilityMask, StateError> {
    let slot = world.placed_agent_slot(agent)?;
    let body = &world.agents[slot];
    let mut opaque = vec![false; world.size() * world.size()];
    world.fill_opacity(&mut opaque);
    let mut mask = VisibilityMask::empty(world.size());
    field_of_view_into(
        &opaque,
        world.size(),
        body.position,
        body.orientation,
        &body.vision,
        &mut FovScratch::default(),
        &mut mask,
    );
    Ok(mask)
}

/// Bird's-eye observation in board coordinates.
pub fn build_allocentric(world: &World, agent: ItemId, mask: &VisibilityMask) -> Result<Observation, StateError> {
    build(world, agent, mask, VisionMode::Allocentric)
}

/// Observation re-centred on the agent: board cell `(r, c)` lands on
/// `(r − ar + N − 1, c − ac + N − 1)` of a `(2N − 1)²` frame. No rotation.
pub fn build_egocentric(world: &World, agent: ItemId, mask: &VisibilityMask) -> Result<Observation, StateError> {
    build(world, agent, mask, VisionMode::Egocentric)
}

pub(crate) fn build(
    world: &World,
    agent: ItemId,
    mask: &VisibilityMask,
    frame: VisionMode,
) -> Result<Observation, StateError> {
    let slot = world.placed_agent_slot(agent)?;
    let n = world.size();
    let me = &world.agents[slot];
    let (side, shift_r, shift_c) = match frame {
        VisionMode::Allocentric => (n, 0, 0),
        VisionMode::Egocentric => (2 * n - 1, n - 1 - me.position.row, n - 1 - me.position.col),
    };
    let place = |p: GridPosition| (p.row + shift_r) * side + (p.col + shift_c);

    let mut observability = vec![0u8; side * side];
    for (p, &v) in mask.grid().iter() {
        if v {
            observability[place(p)] = 1;
        }
    }
    let mut food = vec![0u8; side * side];
    for f in world.foods.iter().filter(|f| !f.consumed && mask.is_visible(f.position)) {
        food[place(f.position)] = 1;
    }
    let mut self_position = vec![0u8; side * side];
    self_position[place(me.position)] = 1;

    let others = world
        .order
        .iter()
        .filter(|&&i| i != slot)
        .map(|&i| {
            let other = &world.agents[i];
            let mut position = vec![0u8; side * side];
            let mut orientation = [0u8; 4];
            if mask.is_visible(other.position) {
                position[place(other.position)] = 1;
                orientation = other.orientation.one_hot();
            }
            OtherAgentView { id: other.id, position, orientation }
        })
        .collect();

    Ok(Observation {
        frame,
        side,
        observability,
        food,
        self_position,
        self_orientation: me.orientation.one_hot(),
        others,
    })
}

impl World {
    pub fn compute_visibility(&self, agent: ItemId) -> Result<VisibilityMask, StateError> {
        compute_visibility(self, agent)
    }

    /// Observation of `agent` in an explicit frame.
    pub fn observe_in(&self, agent: ItemId, frame: VisionMode) -> Result<Observation, StateError> {
        let mask = compute_visibility(self, agent)?;
        build(self, agent, &mask, frame)
    }

    /// Observation of `agent` in its configured frame.
    pub fn observe(&self, agent: ItemId) -> Result<Observation, StateError> {
        let slot = self.placed_agent_slot(agent)?;
        self.observe_in(agent, self.agents[slot].vision.mode)
    }
}
