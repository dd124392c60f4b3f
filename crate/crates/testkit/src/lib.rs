//! Reference models for the test suites. Nothing here shares code paths with
//! the engine beyond its public data types.

use std::cmp::Ordering;

use gridsim_core::{
    create_world, AgentAttributes, DistributionSet, ElementSpec, Grid, GridPosition, ItemId, MaxSteps, ObstacleKind,
    Orientation, Pdm, PdmRef, RewardScheme, ShapeMatrix, World, WorldConfig,
};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Exact rational `p / q`, `q > 0`.
#[derive(Clone, Copy, Debug)]
struct Frac {
    p: i64,
    q: i64,
}

impl Frac {
    fn cmp(self, o: Frac) -> Ordering {
        (self.p * o.q).cmp(&(o.p * self.q))
    }

    fn mid(self, o: Frac) -> Frac {
        Frac { p: self.p * o.q + o.p * self.q, q: 2 * self.q * o.q }
    }
}

/// Sight-line reference for the field of view.
///
/// A sight line is a ray from the viewer's centre inside one of the four
/// quadrants, with lateral slope `s ∈ [-1, 1]` per unit of depth. At every
/// integer depth `k` short of the target it crosses the centre line of that
/// row at lateral offset `s·k`; it dies there if an opaque cell's closed span
/// `[c − ½, c + ½]` contains that point. A target is visible when some line
/// still living at its depth meets its span.
///
/// Every boundary of the "living" sets and of target spans is a slope of the
/// form `(2j+1)/2k` or `±1`, so testing all such slopes plus the midpoints
/// between consecutive ones decides the "some line" question exactly.
pub struct RayOracle {
    size: usize,
    candidates: Vec<Frac>,
}

/// Quadrant-local `(depth, lateral)` to board offset `(drow, dcol)`.
type Quadrant = fn(i64, i64) -> (i64, i64);

const QUADRANTS: [Quadrant; 4] = [
    |d, c| (-d, c),
    |d, c| (d, c),
    |d, c| (c, d),
    |d, c| (c, -d),
];

impl RayOracle {
    pub fn new(size: usize) -> Self {
        let n = size as i64;
        let mut edges = vec![Frac { p: -1, q: 1 }, Frac { p: 1, q: 1 }];
        for k in 1..=n.max(1) {
            for j in -k..k {
                edges.push(Frac { p: 2 * j + 1, q: 2 * k });
            }
        }
        edges.sort_by(|a, b| a.cmp(*b));
        edges.dedup_by(|a, b| a.cmp(*b) == Ordering::Equal);
        let mut candidates = Vec::with_capacity(edges.len() * 2);
        for w in edges.windows(2) {
            candidates.push(w[0]);
            candidates.push(w[0].mid(w[1]));
        }
        candidates.push(*edges.last().unwrap());
        Self { size, candidates }
    }

    fn opaque_at(&self, opaque: &Grid<bool>, r: i64, c: i64) -> bool {
        let n = self.size as i64;
        (0..n).contains(&r) && (0..n).contains(&c) && *opaque.get(GridPosition::new(r as usize, c as usize))
    }

    fn line_lives(&self, opaque: &Grid<bool>, origin: (i64, i64), quad: usize, s: Frac, depth: i64) -> bool {
        for k in 1..depth {
            let twice = 2 * s.p * k; // 2·s·k = twice / q
            let base = (s.p * k).div_euclid(s.q);
            for c in base - 1..=base + 1 {
                if (2 * c - 1) * s.q <= twice && twice <= (2 * c + 1) * s.q {
                    let (dr, dc) = QUADRANTS[quad](k, c);
                    if self.opaque_at(opaque, origin.0 + dr, origin.1 + dc) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Occlusion only: which cells some sight line reaches.
    pub fn reachable(&self, opaque: &Grid<bool>, origin: GridPosition) -> Vec<bool> {
        let n = self.size;
        let o = (origin.row as i64, origin.col as i64);
        let mut out = vec![false; n * n];
        for (i, slot) in out.iter_mut().enumerate() {
            let t = GridPosition::from_index(i, n);
            let (dr, dc) = (t.row as i64 - o.0, t.col as i64 - o.1);
            if dr == 0 && dc == 0 {
                *slot = true;
                continue;
            }
            'quads: for quad in 0..4 {
                // invert the quadrant map
                let (d, c) = match quad {
                    0 => (-dr, dc),
                    1 => (dr, dc),
                    2 => (dc, dr),
                    _ => (-dc, dr),
                };
                if d < 1 || c.abs() > d {
                    continue;
                }
                let lo = Frac { p: 2 * c - 1, q: 2 * d };
                let hi = Frac { p: 2 * c + 1, q: 2 * d };
                for &s in &self.candidates {
                    if s.cmp(lo) != Ordering::Less
                        && s.cmp(hi) != Ordering::Greater
                        && self.line_lives(opaque, o, quad, s, d)
                    {
                        *slot = true;
                        break 'quads;
                    }
                }
            }
        }
        out
    }
}

/// Cone predicate on a centre offset, decided in integers for the quarter
/// angles and by `acos` otherwise. The viewer's cell always passes.
pub fn in_cone(drow: i64, dcol: i64, facing: Orientation, angle_deg: f64) -> bool {
    if drow == 0 && dcol == 0 {
        return true;
    }
    if angle_deg >= 360.0 {
        return true;
    }
    if angle_deg <= 0.0 {
        return false;
    }
    // forward and sideways components relative to facing
    let (forward, side) = match facing {
        Orientation::North => (-drow, dcol),
        Orientation::South => (drow, dcol),
        Orientation::East => (dcol, drow),
        Orientation::West => (-dcol, drow),
    };
    let side = side.abs();
    if angle_deg == 90.0 {
        forward >= side
    } else if angle_deg == 180.0 {
        forward >= 0
    } else if angle_deg == 270.0 {
        forward >= -side
    } else {
        let len = ((forward * forward + side * side) as f64).sqrt();
        (forward as f64 / len).clamp(-1.0, 1.0).acos().to_degrees() <= angle_deg / 2.0 + 1e-9
    }
}

/// Full reference visibility: sight lines, then cone, then Euclidean range.
pub fn reference_visibility(
    oracle: &RayOracle,
    opaque: &Grid<bool>,
    origin: GridPosition,
    facing: Orientation,
    angle_deg: f64,
    range: Option<f64>,
) -> Vec<bool> {
    let reach = oracle.reachable(opaque, origin);
    filter_reachable(&reach, opaque.size(), origin, facing, angle_deg, range)
}

/// Applies cone and range to a precomputed occlusion map.
pub fn filter_reachable(
    reach: &[bool],
    size: usize,
    origin: GridPosition,
    facing: Orientation,
    angle_deg: f64,
    range: Option<f64>,
) -> Vec<bool> {
    reach
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let t = GridPosition::from_index(i, size);
            let dr = t.row as i64 - origin.row as i64;
            let dc = t.col as i64 - origin.col as i64;
            if dr == 0 && dc == 0 {
                return true;
            }
            let in_range = range.is_none_or(|lim| ((dr * dr + dc * dc) as f64) <= lim * lim);
            r && in_range && in_cone(dr, dc, facing, angle_deg)
        })
        .collect()
}

/// Breadth-first shortest 4-connected distance, `None` when unreachable.
pub fn bfs_distance(size: usize, passable: &[bool], start: GridPosition, goal: GridPosition) -> Option<usize> {
    if start == goal {
        return Some(0);
    }
    if !passable[goal.index(size)] {
        return None;
    }
    let mut dist = vec![usize::MAX; size * size];
    let mut queue = std::collections::VecDeque::new();
    dist[start.index(size)] = 0;
    queue.push_back(start);
    while let Some(p) = queue.pop_front() {
        let d = dist[p.index(size)];
        for dir in Orientation::ALL {
            if let Some(q) = p.step(dir, size) {
                let j = q.index(size);
                if passable[j] && dist[j] == usize::MAX {
                    dist[j] = d + 1;
                    if q == goal {
                        return Some(d + 1);
                    }
                    queue.push_back(q);
                }
            }
        }
    }
    None
}

/// Pearson statistic and degrees of freedom over cells with positive expected mass.
pub fn chi_square(observed: &[u64], probabilities: &[f64]) -> (f64, usize) {
    let total: u64 = observed.iter().sum();
    let mut stat = 0.0;
    let mut bins = 0usize;
    for (&o, &p) in observed.iter().zip(probabilities) {
        if p <= 0.0 {
            assert_eq!(o, 0, "mass observed where probability is zero");
            continue;
        }
        let e = p * total as f64;
        stat += (o as f64 - e).powi(2) / e;
        bins += 1;
    }
    (stat, bins.saturating_sub(1))
}

/// Upper critical value of the chi-square distribution.
pub fn chi_square_critical(df: usize, alpha: f64) -> f64 {
    ChiSquared::new(df as f64).expect("df > 0").inverse_cdf(1.0 - alpha)
}

/// Builds generated worlds with every element pinned to a chosen cell.
pub struct Layout {
    size: usize,
    max_steps: MaxSteps,
    scheme: RewardScheme,
    seed: u64,
    specs: Vec<ElementSpec>,
    dists: DistributionSet,
    order: Vec<ItemId>,
    next: u32,
}

impl Layout {
    pub fn new(size: usize) -> Self {
        Self {
            size,
            max_steps: MaxSteps::Limited(100),
            scheme: RewardScheme::default(),
            seed: 0,
            specs: Vec::new(),
            dists: DistributionSet::new(),
            order: Vec::new(),
            next: 0,
        }
    }

    pub fn max_steps(mut self, m: MaxSteps) -> Self {
        self.max_steps = m;
        self
    }

    pub fn scheme(mut self, s: RewardScheme) -> Self {
        self.scheme = s;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn pin(&mut self, at: GridPosition) -> (ItemId, PdmRef) {
        let id = ItemId(self.next);
        self.next += 1;
        let mut w = vec![0.0; self.size * self.size];
        w[at.index(self.size)] = 1.0;
        let name = format!("at{}", id.0);
        self.dists.insert(name.clone(), Pdm::normalize(self.size, &w).unwrap());
        (id, PdmRef::Named(name))
    }

    /// Agents act in the order they are added.
    pub fn agent(&mut self, at: GridPosition, attrs: AgentAttributes) -> ItemId {
        let (id, pdm) = self.pin(at);
        self.specs.push(ElementSpec::agent(id, attrs, pdm));
        self.order.push(id);
        id
    }

    pub fn food(&mut self, at: GridPosition) -> ItemId {
        let (id, pdm) = self.pin(at);
        self.specs.push(ElementSpec::food(id, pdm));
        id
    }

    pub fn obstacle(&mut self, at: GridPosition, kind: ObstacleKind) -> ItemId {
        let (id, pdm) = self.pin(at);
        self.specs.push(ElementSpec::obstacle(id, kind, ShapeMatrix::single(), pdm));
        id
    }

    pub fn build(&self) -> World {
        let config = WorldConfig {
            world_size: self.size,
            max_steps: self.max_steps,
            reward_scheme: self.scheme.clone(),
            action_order: self.order.clone(),
            seed: self.seed,
        };
        let mut w = create_world(config, self.dists.clone(), self.specs.clone()).expect("valid layout");
        w.generate().expect("layout cells are distinct");
        w
    }
}

pub fn agent_facing(orientation: Orientation) -> AgentAttributes {
    AgentAttributes { orientation, ..AgentAttributes::default() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_values_match_tables() {
        // df = 8, alpha = 0.001: 26.124
        assert!((chi_square_critical(8, 0.001) - 26.124).abs() < 1e-2);
        assert!((chi_square_critical(24, 0.001) - 51.179).abs() < 1e-2);
    }

    #[test]
    fn bfs_small() {
        let pass = vec![true; 9];
        assert_eq!(bfs_distance(3, &pass, GridPosition::new(0, 0), GridPosition::new(2, 2)), Some(4));
    }

    #[test]
    fn candidate_set_is_sorted_and_bounded() {
        let o = RayOracle::new(4);
        for w in o.candidates.windows(2) {
            assert_eq!(w[0].cmp(w[1]), Ordering::Less);
        }
        assert_eq!(o.candidates[0].cmp(Frac { p: -1, q: 1 }), Ordering::Equal);
    }

    #[test]
    fn ray_oracle_hand_cases() {
        let o = RayOracle::new(5);
        let mut g = Grid::filled(5, false);
        g.set(GridPosition::new(2, 3), true);
        let r = o.reachable(&g, GridPosition::new(2, 0));
        assert!(r[GridPosition::new(2, 3).index(5)]);
        assert!(!r[GridPosition::new(2, 4).index(5)]);
    }
}
