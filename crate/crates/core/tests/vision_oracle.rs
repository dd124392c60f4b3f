use gridsim_core::{field_of_view, Grid, GridPosition, Orientation, SimRng, VisionMode, VisionParams, VisionRange};
use gridsim_testkit::{filter_reachable, RayOracle};
use proptest::prelude::*;

fn random_layout(n: usize, rng: &mut SimRng) -> Grid<bool> {
    let density = rng.unit_f64() * 0.5;
    let cells = (0..n * n).map(|_| rng.unit_f64() < density).collect();
    Grid::from_vec(n, cells).unwrap()
}

fn params(angle: f64, range: Option<f64>) -> VisionParams {
    VisionParams {
        mode: VisionMode::Allocentric,
        angle_deg: angle,
        range: range.map_or(VisionRange::Infinite, VisionRange::Limited),
    }
}

fn check(oracle: &RayOracle, g: &Grid<bool>, origin: GridPosition) {
    let reach = oracle.reachable(g, origin);
    for facing in Orientation::ALL {
        for angle in [0.0, 45.0, 90.0, 135.0, 180.0, 270.0, 360.0] {
            for range in [Some(1.0), Some(1.5), Some(2.0), Some(3.0), None] {
                let got = field_of_view(g, origin, facing, &params(angle, range));
                let want = filter_reachable(&reach, g.size(), origin, facing, angle, range);
                if angle == 0.0 {
                    assert_eq!(got.count(), 1);
                    continue;
                }
                assert_eq!(got.as_slice(), &want[..], "origin {origin} facing {facing:?} angle {angle} range {range:?}\n{g:?}");
            }
        }
    }
}

#[test]
fn matches_ray_oracle_on_random_layouts() {
    let mut rng = SimRng::from_seed(2024);
    for n in [1usize, 2, 3, 4, 6, 8] {
        let oracle = RayOracle::new(n);
        for _ in 0..30 {
            let g = random_layout(n, &mut rng);
            for origin in g.positions().filter(|p| !*g.get(*p)) {
                check(&oracle, &g, origin);
            }
        }
    }
}

#[test]
fn opaque_origin_cell_is_irrelevant() {
    let oracle = RayOracle::new(5);
    let mut g = Grid::filled(5, false);
    g.set(GridPosition::new(2, 2), true);
    g.set(GridPosition::new(1, 2), true);
    check(&oracle, &g, GridPosition::new(2, 2));
}

fn layout_strategy() -> impl Strategy<Value = (usize, Vec<bool>, usize)> {
    (1usize..8).prop_flat_map(|n| (Just(n), prop::collection::vec(prop::bool::weighted(0.3), n * n), 0..n * n))
}

proptest! {
    #[test]
    fn widening_never_hides((n, cells, o) in layout_strategy(), f in 0usize..4, a in 0.0f64..360.0, da in 0.0f64..90.0, r in 0.5f64..9.0, dr in 0.0f64..3.0) {
        let g = Grid::from_vec(n, cells).unwrap();
        let origin = GridPosition::from_index(o, n);
        let facing = Orientation::from_index(f).unwrap();
        let narrow = field_of_view(&g, origin, facing, &params(a, Some(r)));
        let wider = field_of_view(&g, origin, facing, &params((a + da).min(360.0), Some(r)));
        let longer = field_of_view(&g, origin, facing, &params(a, Some(r + dr)));
        let unlimited = field_of_view(&g, origin, facing, &params(a, None));
        for i in 0..n * n {
            let p = GridPosition::from_index(i, n);
            if narrow.is_visible(p) {
                prop_assert!(wider.is_visible(p));
                prop_assert!(longer.is_visible(p));
                prop_assert!(unlimited.is_visible(p));
            }
        }
        prop_assert!(narrow.is_visible(origin));
    }

    #[test]
    fn clearing_an_occluder_never_hides((n, cells, o) in layout_strategy(), pick in any::<prop::sample::Index>(), f in 0usize..4) {
        let g = Grid::from_vec(n, cells).unwrap();
        let origin = GridPosition::from_index(o, n);
        let facing = Orientation::from_index(f).unwrap();
        let mut cleared = g.clone();
        let idx = pick.index(n * n);
        cleared.as_mut_slice()[idx] = false;
        let before = field_of_view(&g, origin, facing, &params(360.0, None));
        let after = field_of_view(&cleared, origin, facing, &params(360.0, None));
        for i in 0..n * n {
            if before.as_slice()[i] {
                prop_assert!(after.as_slice()[i]);
            }
        }
    }
}
