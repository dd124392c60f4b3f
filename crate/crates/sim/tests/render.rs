mod common;

use gridsim::render::{FOOD, WALL};
use gridsim::{render_ppm, render_text, run_episode_with, Env, EnvOptions, Overrides};
use gridsim_core::GridPosition;

#[test]
fn empty_world_is_all_dots() {
    let env = Env::new(common::scenario(r#"{"world_size": 4}"#), EnvOptions::default()).unwrap();
    let f = render_text(env.world());
    assert!(f.glyphs.iter().all(|g| *g == '.'));
    assert_eq!(f.to_string(), "....\n".repeat(4));
}

#[test]
fn competition_board_shows_its_pieces() {
    let env = Env::new(common::shipped(), EnvOptions::default()).unwrap();
    let f = render_text(env.world());
    let count = |c: char| f.glyphs.iter().filter(|g| **g == c).count();
    assert_eq!((count('A'), count('B'), count(FOOD), count(WALL)), (1, 1, 1, 4));
    let wall_cols: Vec<usize> = (0..121).filter(|i| f.glyphs[*i] == WALL).map(|i| i % 11).collect();
    assert!(wall_cols.iter().all(|c| *c == 5));
    for body in env.world().agents() {
        let rank = env.action_order().iter().position(|id| *id == body.id).unwrap();
        assert_eq!(f.glyph(body.position), gridsim::render::agent_glyph(rank));
    }
    assert_eq!(f.legend, vec![('A', 0), ('B', 1)]);
}

#[test]
fn eaten_food_disappears() {
    let mut last = None;
    run_episode_with(&common::shipped(), &Overrides::default(), |env, _| last = Some(render_text(env.world())))
        .unwrap();
    let f = last.unwrap();
    assert!(!f.glyphs.contains(&FOOD), "{f}");
}

#[test]
fn ppm_has_the_right_size_and_colours() {
    let env = Env::new(common::shipped(), EnvOptions::default()).unwrap();
    let img = render_ppm(env.world(), 3);
    let header = b"P6\n33 33\n255\n";
    assert!(img.starts_with(header));
    assert_eq!(img.len(), header.len() + 33 * 33 * 3);
    let f = render_text(env.world());
    let wall = (0..121).find(|i| f.glyphs[*i] == WALL).unwrap();
    let p = GridPosition::from_index(wall, 11);
    let px = header.len() + ((p.row * 3 + 1) * 33 + p.col * 3 + 1) * 3;
    assert_eq!(&img[px..px + 3], &[60, 60, 60]);
}
