//! Square grid coordinates, facing directions and a flat row-major grid container.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// A cell on an N×N board, top-left origin, 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct GridPosition {
    pub row: usize,
    pub col: usize,
}

impl GridPosition {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }

    #[inline]
    pub fn index(self, size: usize) -> usize {
        self.row * size + self.col
    }

    #[inline]
    pub fn from_index(index: usize, size: usize) -> Self {
        Self { row: index / size, col: index % size }
    }

    #[inline]
    pub fn in_bounds(self, size: usize) -> bool {
        self.row < size && self.col < size
    }

    /// Shifts by a signed offset, returning `None` when the result leaves the board.
    #[inline]
    pub fn offset(self, drow: isize, dcol: isize, size: usize) -> Option<Self> {
        let row = self.row as isize + drow;
        let col = self.col as isize + dcol;
        if row < 0 || col < 0 || row >= size as isize || col >= size as isize {
            None
        } else {
            Some(Self { row: row as usize, col: col as usize })
        }
    }

    /// The neighbouring cell one step towards `dir`.
    #[inline]
    pub fn step(self, dir: Orientation, size: usize) -> Option<Self> {
        let (dr, dc) = dir.delta();
        self.offset(dr, dc, size)
    }

    /// Direction of a 4-neighbour, if `other` is one.
    pub fn direction_to(self, other: GridPosition) -> Option<Orientation> {
        let dr = other.row as isize - self.row as isize;
        let dc = other.col as isize - self.col as isize;
        Orientation::ALL.into_iter().find(|d| d.delta() == (dr, dc))
    }

    pub fn manhattan(self, other: GridPosition) -> usize {
        self.row.abs_diff(other.row) + self.col.abs_diff(other.col)
    }
}

impl fmt::Display for GridPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

/// Facing direction. The discriminant order (N, S, E, W) is the one-hot order
/// used by observations and by the action wire codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Orientation {
    #[default]
    North = 0,
    South = 1,
    East = 2,
    West = 3,
}

impl Orientation {
    pub const ALL: [Orientation; 4] =
        [Orientation::North, Orientation::South, Orientation::East, Orientation::West];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    /// Row/column step for one cell of movement.
    #[inline]
    pub fn delta(self) -> (isize, isize) {
        match self {
            Orientation::North => (-1, 0),
            Orientation::South => (1, 0),
            Orientation::East => (0, 1),
            Orientation::West => (0, -1),
        }
    }

    /// Unit vector in a y-up plane: `(x, y)` with x towards East and y towards North.
    #[inline]
    pub fn vector(self) -> (i64, i64) {
        match self {
            Orientation::North => (0, 1),
            Orientation::South => (0, -1),
            Orientation::East => (1, 0),
            Orientation::West => (-1, 0),
        }
    }

    pub fn one_hot(self) -> [u8; 4] {
        let mut v = [0; 4];
        v[self.index()] = 1;
        v
    }

    /// Inverse of [`Orientation::one_hot`]; anything other than exactly one set bit is rejected.
    pub fn from_one_hot(bits: [u8; 4]) -> Option<Self> {
        let mut found = None;
        for (i, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 if found.is_none() => found = Some(i),
                _ => return None,
            }
        }
        found.and_then(Self::from_index)
    }

    pub fn name(self) -> &'static str {
        match self {
            Orientation::North => "north",
            Orientation::South => "south",
            Orientation::East => "east",
            Orientation::West => "west",
        }
    }
}

/// Dense N×N storage, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Grid<T> {
    size: usize,
    cells: Vec<T>,
}

impl<T: Clone> Grid<T> {
    pub fn filled(size: usize, value: T) -> Self {
        Self { size, cells: vec![value; size * size] }
    }

    pub fn fill(&mut self, value: T) {
        self.cells.iter_mut().for_each(|c| *c = value.clone());
    }
}

impl<T> Grid<T> {
    /// Wraps row-major cells; `None` unless `cells.len() == size * size`.
    pub fn from_vec(size: usize, cells: Vec<T>) -> Option<Self> {
        (cells.len() == size * size).then_some(Self { size, cells })
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, pos: GridPosition) -> &T {
        &self.cells[pos.index(self.size)]
    }

    #[inline]
    pub fn get_mut(&mut self, pos: GridPosition) -> &mut T {
        let size = self.size;
        &mut self.cells[pos.index(size)]
    }

    #[inline]
    pub fn set(&mut self, pos: GridPosition, value: T) {
        *self.get_mut(pos) = value;
    }

    pub fn as_slice(&self) -> &[T] {
        &self.cells
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.cells
    }

    pub fn into_vec(self) -> Vec<T> {
        self.cells
    }

    /// Cells with their positions in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (GridPosition, &T)> + '_ {
        let size = self.size;
        self.cells.iter().enumerate().map(move |(i, c)| (GridPosition::from_index(i, size), c))
    }

    pub fn positions(&self) -> impl Iterator<Item = GridPosition> {
        let size = self.size;
        (0..size * size).map(move |i| GridPosition::from_index(i, size))
    }
}
