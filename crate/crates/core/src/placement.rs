//! Spawn distributions, obstacle shapes and episode-start placement.
//!
//! Placement runs in three passes: agents, then foods, then obstacles, each
//! pass in registration order. Every element costs exactly one generator draw.
//! An obstacle's sampled cell is its anchor, which must be unclaimed; the
//! remaining shape cells silently yield to anything placed before them.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{PdmError, PlacementError, ShapeError};
use crate::grid::GridPosition;
use crate::rng::SimRng;
use crate::world::ItemId;

/// Normalised spawn weights over an N×N board.
#[derive(Clone, Debug, PartialEq)]
pub struct Pdm {
    size: usize,
    weights: Vec<f64>,
}

impl Pdm {
    /// Normalises row-major `weights` of an N×N board so that they sum to one.
    pub fn normalize(size: usize, weights: &[f64]) -> Result<Self, PdmError> {
        if size == 0 || weights.is_empty() {
            return Err(PdmError::Empty);
        }
        if weights.len() != size * size {
            return Err(PdmError::NotSquare { rows: weights.len() / size, cols: size });
        }
        let mut total = 0.0;
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(PdmError::InvalidWeight { row: i / size, col: i % size });
            }
            total += w;
        }
        if total <= 0.0 {
            return Err(PdmError::NoSupport);
        }
        Ok(Self { size, weights: weights.iter().map(|w| w / total).collect() })
    }

    /// Builds from nested rows, rejecting anything that is not square.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, PdmError> {
        let n = rows.len();
        if n == 0 {
            return Err(PdmError::Empty);
        }
        let mut flat = Vec::with_capacity(n * n);
        for r in rows {
            let r = r.as_ref();
            if r.len() != n {
                return Err(PdmError::NotSquare { rows: n, cols: r.len() });
            }
            flat.extend_from_slice(r);
        }
        Self::normalize(n, &flat)
    }

    pub fn uniform(size: usize) -> Self {
        let w = 1.0 / (size * size) as f64;
        Self { size, weights: vec![w; size * size] }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn weight(&self, pos: GridPosition) -> f64 {
        self.weights[pos.index(self.size)]
    }

    /// Row-major normalised weights.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Binary footprint of an obstacle, anchored at `(rows / 2, cols / 2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeMatrix {
    rows: usize,
    cols: usize,
    cells: Vec<bool>,
}

impl ShapeMatrix {
    pub fn new<R: AsRef<[bool]>>(rows: &[R]) -> Result<Self, ShapeError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        if nrows == 0 || ncols == 0 {
            return Err(ShapeError::Empty);
        }
        let mut cells = Vec::with_capacity(nrows * ncols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != ncols {
                return Err(ShapeError::Ragged);
            }
            cells.extend_from_slice(r);
        }
        let shape = Self { rows: nrows, cols: ncols, cells };
        let (ar, ac) = shape.anchor();
        if !shape.cell(ar, ac) {
            return Err(ShapeError::AnchorUnset { row: ar, col: ac });
        }
        Ok(shape)
    }

    /// A single-cell obstacle.
    pub fn single() -> Self {
        Self { rows: 1, cols: 1, cells: vec![true] }
    }

    /// Shape from 0/1 rows.
    pub fn from_bits<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self, ShapeError> {
        let rows: Vec<Vec<bool>> =
            rows.iter().map(|r| r.as_ref().iter().map(|&b| b != 0).collect()).collect();
        Self::new(&rows)
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn anchor(&self) -> (usize, usize) {
        (self.rows / 2, self.cols / 2)
    }

    pub fn cell(&self, row: usize, col: usize) -> bool {
        self.cells[row * self.cols + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[bool]> {
        self.cells.chunks(self.cols)
    }
}

/// Cells covered by `shape` with its anchor on `center`, clipped to the board,
/// in row-major order.
pub fn stamp_obstacle(shape: &ShapeMatrix, center: GridPosition, size: usize) -> Vec<GridPosition> {
    let (ar, ac) = shape.anchor();
    let (rows, cols) = shape.dims();
    let mut out = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if !shape.cell(r, c) {
                continue;
            }
            let dr = r as isize - ar as isize;
            let dc = c as isize - ac as isize;
            if let Some(p) = center.offset(dr, dc, size) {
                out.push(p);
            }
        }
    }
    out
}

/// Draws one cell with probability proportional to `pdm` restricted to cells
/// where `occupied` is false. Consumes exactly one draw from `rng` whenever
/// an admissible cell exists, none otherwise.
pub fn sample_position(
    pdm: &Pdm,
    occupied: &[bool],
    rng: &mut SimRng,
) -> Result<GridPosition, PlacementError> {
    debug_assert_eq!(occupied.len(), pdm.weights.len());
    let admissible = |i: usize| !occupied[i] && pdm.weights[i] > 0.0;
    let total: f64 = (0..pdm.weights.len()).filter(|&i| admissible(i)).map(|i| pdm.weights[i]).sum();
    if total <= 0.0 {
        return Err(PlacementError { element: None });
    }
    let target = rng.unit_f64() * total;
    let mut acc = 0.0;
    let mut last = None;
    for i in (0..pdm.weights.len()).filter(|&i| admissible(i)) {
        acc += pdm.weights[i];
        last = Some(i);
        if acc > target {
            return Ok(GridPosition::from_index(i, pdm.size));
        }
    }
    // rounding can leave `acc` a hair below `target`
    Ok(GridPosition::from_index(last.expect("total > 0 implies an admissible cell"), pdm.size))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ElementClass {
    Agent,
    Food,
    Obstacle,
}

/// One element to be placed.
#[derive(Clone, Copy, Debug)]
pub struct PlacementRequest<'a> {
    pub element: ItemId,
    pub class: ElementClass,
    pub pdm: &'a Pdm,
    /// Footprint for obstacles; ignored for other classes.
    pub shape: Option<&'a ShapeMatrix>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlacedElement {
    pub element: ItemId,
    pub class: ElementClass,
    /// Sampled cell; the anchor for obstacles.
    pub center: GridPosition,
    /// Cells actually claimed. Always contains `center`.
    pub cells: Vec<GridPosition>,
}

/// Places every request by priority class (agents, foods, obstacles) and,
/// within a class, in the given order. Output follows the same order.
pub fn place_all(
    size: usize,
    requests: &[PlacementRequest<'_>],
    rng: &mut SimRng,
) -> Result<Vec<PlacedElement>, PlacementError> {
    let mut claimed = vec![false; size * size];
    let mut placed = Vec::with_capacity(requests.len());
    for class in [ElementClass::Agent, ElementClass::Food, ElementClass::Obstacle] {
        for req in requests.iter().filter(|r| r.class == class) {
            let center = sample_position(req.pdm, &claimed, rng)
                .map_err(|_| PlacementError { element: Some(req.element) })?;
            let cells = match (class, req.shape) {
                (ElementClass::Obstacle, Some(shape)) => stamp_obstacle(shape, center, size)
                    .into_iter()
                    .filter(|p| *p == center || !claimed[p.index(size)])
                    .collect(),
                _ => vec![center],
            };
            for p in &cells {
                claimed[p.index(size)] = true;
            }
            placed.push(PlacedElement { element: req.element, class, center, cells });
        }
    }
    Ok(placed)
}
