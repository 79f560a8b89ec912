use proptest::prelude::*;
use sentry_core::gridmap::{
    inflate, inflate_with, load_map, save_map, threshold, BinaryGrid, Costmap, Georeferenced,
    GridGeometry, GridPoint, WorldPoint,
};
use sentry_core::Exec;

fn costmap() -> impl Strategy<Value = Costmap> {
    (1usize..30, 1usize..30).prop_flat_map(|(w, h)| {
        proptest::collection::vec(0u8..=100, w * h).prop_map(move |cells| {
            let g = GridGeometry::new(w, h, 0.05, WorldPoint::new(-1.0, 2.0)).unwrap();
            Costmap::new(g, cells).unwrap()
        })
    })
}

fn binary(max: usize, res: f64) -> impl Strategy<Value = BinaryGrid> {
    (1usize..max, 1usize..max, -50.0f64..50.0, -50.0f64..50.0).prop_flat_map(
        move |(w, h, ox, oy)| {
            proptest::collection::vec(proptest::bool::weighted(0.15), w * h).prop_map(move |occ| {
                let g = GridGeometry::new(w, h, res, WorldPoint::new(ox, oy)).unwrap();
                BinaryGrid::new(
                    g,
                    occ.into_iter().map(|o| if o { 0 } else { 255 }).collect(),
                )
                .unwrap()
            })
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn threshold_is_monotone(map in costmap(), a in 1u8..=100, b in 1u8..=100) {
        let (lo, hi) = (a.min(b), a.max(b));
        let (g_lo, g_hi) = (threshold(&map, lo).unwrap(), threshold(&map, hi).unwrap());
        for (x, y) in g_lo.cells().iter().zip(g_hi.cells()) {
            prop_assert!(!(*x == 255 && *y == 0), "raising the threshold added an obstacle");
        }
        for (c, v) in map.cells().iter().zip(g_lo.cells()) {
            prop_assert_eq!(*v == 0, *c >= lo);
        }
    }

    #[test]
    fn save_load_round_trip(grid in binary(40, 0.05)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.yaml");
        save_map(&grid, &path).unwrap();
        let back = load_map(&path).unwrap();
        prop_assert_eq!(back.cells(), grid.cells());
        prop_assert_eq!(back.geometry(), grid.geometry());
    }

    #[test]
    fn inflation_matches_brute_force(grid in binary(24, 0.5), r2 in 0u32..9) {
        // radius in half-cells keeps every comparison exact
        let radius = r2 as f64 * 0.25;
        let out = inflate(&grid, radius);
        let (w, h) = (grid.width() as i64, grid.height() as i64);
        let occ: Vec<GridPoint> = grid.occupied_cells().collect();
        for y in 0..h {
            for x in 0..w {
                let want = occ.iter().any(|o| {
                    let (dx, dy) = ((o.x - x) as f64 * 0.5, (o.y - y) as f64 * 0.5);
                    dx * dx + dy * dy <= radius * radius
                });
                prop_assert_eq!(out.is_occupied(GridPoint::new(x, y)), want, "cell ({}, {})", x, y);
            }
        }
        prop_assert_eq!(inflate_with(&grid, radius, Exec::Sequential), inflate_with(&grid, radius, Exec::Parallel));
    }

    #[test]
    fn inflation_is_monotone_in_radius(grid in binary(30, 0.05), a in 0.0f64..0.4, b in 0.0f64..0.4) {
        let (lo, hi) = (inflate(&grid, a.min(b)), inflate(&grid, a.max(b)));
        for (x, y) in lo.cells().iter().zip(hi.cells()) {
            prop_assert!(!(*x == 0 && *y == 255));
        }
        for (x, y) in grid.cells().iter().zip(lo.cells()) {
            prop_assert!(!(*x == 0 && *y == 255));
        }
    }

    #[test]
    fn cell_centers_round_trip(grid in binary(20, 0.05), x in 0i64..19, y in 0i64..19) {
        let g = grid.geometry();
        let p = GridPoint::new(x, y);
        prop_assert_eq!(g.world_to_grid(g.grid_to_world(p)), p);
    }
}
