//! Text and raster snapshots of a placed world.

use std::fmt;

use gridsim_core::{GridPosition, ObstacleKind, World};

pub const EMPTY: char = '.';
pub const WALL: char = '#';
pub const WATER: char = '~';
pub const FOOD: char = '*';

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RenderFrame {
    pub size: usize,
    /// Row-major, one glyph per cell.
    pub glyphs: Vec<char>,
    /// Agent glyphs and the ids they stand for, in action order.
    pub legend: Vec<(char, u32)>,
}

impl RenderFrame {
    pub fn glyph(&self, pos: GridPosition) -> char {
        self.glyphs[pos.index(self.size)]
    }
}

impl fmt::Display for RenderFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.glyphs.chunks(self.size) {
            writeln!(f, "{}", row.iter().collect::<String>())?;
        }
        for (g, id) in &self.legend {
            writeln!(f, "{g} = agent {id}")?;
        }
        Ok(())
    }
}

/// Agents are lettered `A`, `B`, … in action order; past `Z` they show as `@`.
pub fn agent_glyph(rank: usize) -> char {
    if rank < 26 {
        (b'A' + rank as u8) as char
    } else {
        '@'
    }
}

pub fn render_text(world: &World) -> RenderFrame {
    let n = world.size();
    let mut glyphs = Vec::with_capacity(n * n);
    for i in 0..n * n {
        let p = GridPosition::from_index(i, n);
        let g = if world.agent_at(p).is_some() {
            '?'
        } else if world.food_at(p).is_some() {
            FOOD
        } else {
            match world.obstacle_at(p).map(|o| o.kind) {
                Some(ObstacleKind::Wall) => WALL,
                Some(ObstacleKind::Water) => WATER,
                None => EMPTY,
            }
        };
        glyphs.push(g);
    }
    let mut legend = Vec::new();
    for (rank, id) in world.action_order().iter().enumerate() {
        let g = agent_glyph(rank);
        let body = world.agent(*id).expect("ordered ids are agents");
        glyphs[body.position.index(n)] = g;
        legend.push((g, id.0));
    }
    RenderFrame { size: n, glyphs, legend }
}

const AGENT_COLOURS: [[u8; 3]; 6] =
    [[214, 39, 40], [31, 119, 180], [44, 160, 44], [148, 103, 189], [255, 127, 14], [23, 190, 207]];

fn colour(frame: &RenderFrame, g: char) -> [u8; 3] {
    match g {
        EMPTY => [245, 245, 245],
        WALL => [60, 60, 60],
        WATER => [120, 170, 230],
        FOOD => [240, 200, 30],
        _ => {
            let rank = frame.legend.iter().position(|(c, _)| *c == g).unwrap_or(0);
            AGENT_COLOURS[rank % AGENT_COLOURS.len()]
        }
    }
}

/// Binary PPM (P6) with `scale × scale` pixels per cell.
pub fn render_ppm(world: &World, scale: usize) -> Vec<u8> {
    let frame = render_text(world);
    let n = frame.size;
    let side = n * scale.max(1);
    let mut out = format!("P6\n{side} {side}\n255\n").into_bytes();
    for y in 0..side {
        for x in 0..side {
            let g = frame.glyphs[(y / scale.max(1)) * n + x / scale.max(1)];
            out.extend_from_slice(&colour(&frame, g));
        }
    }
    out
}
