use super::{BinaryGrid, Costmap, Georeferenced, FREE, MAX_COST, OCCUPIED};
use crate::error::{Error, Result};
use crate::exec::Exec;

/// Convert a costmap to a binary grid: cost `>= thresh` becomes occupied.
pub fn threshold(map: &Costmap, thresh: u8) -> Result<BinaryGrid> {
    if !(1..=MAX_COST).contains(&thresh) {
        return Err(Error::invalid(
            "thresh",
            format!("{thresh} is outside 1..=100"),
        ));
    }
    let cells = map
        .cells()
        .iter()
        .map(|&c| if c >= thresh { OCCUPIED } else { FREE })
        .collect();
    Ok(BinaryGrid::from_raw(*map.geometry(), cells))
}

/// Cell offsets whose centers lie within `radius_cells` of the origin cell
/// center (Euclidean, inclusive).
pub fn disk_offsets(radius_cells: f64) -> Vec<(i64, i64)> {
    let reach = (radius_cells + 1e-9).floor().max(0.0) as i64;
    let r2 = radius_cells * radius_cells + 1e-9;
    let mut out = Vec::new();
    for dy in -reach..=reach {
        for dx in -reach..=reach {
            if ((dx * dx + dy * dy) as f64) <= r2 {
                out.push((dx, dy));
            }
        }
    }
    out
}

/// Grow occupied cells by `radius` meters (center-to-center distance).
pub fn inflate(grid: &BinaryGrid, radius: f64) -> BinaryGrid {
    inflate_with(grid, radius, Exec::default())
}

pub fn inflate_with(grid: &BinaryGrid, radius: f64, exec: Exec) -> BinaryGrid {
    let geom = *grid.geometry();
    if !(radius > 0.0) {
        return grid.clone();
    }
    let offsets = disk_offsets(radius / geom.resolution);
    let (w, h) = (geom.width as i64, geom.height as i64);
    let src = grid.cells();

    // Per row of the mask, the half-width of the disk; lets each output row
    // test a contiguous span of each source row.
    let reach = offsets.iter().map(|o| o.1.abs()).max().unwrap_or(0);
    let mut spans = vec![-1i64; (2 * reach + 1) as usize];
    for &(dx, dy) in &offsets {
        let s = &mut spans[(dy + reach) as usize];
        *s = (*s).max(dx.abs());
    }

    // Prefix sums of occupied cells per row make each span test O(1).
    let prefix: Vec<u32> = {
        let mut p = vec![0u32; (geom.width + 1) * geom.height];
        for y in 0..geom.height {
            let row = &src[y * geom.width..(y + 1) * geom.width];
            let base = y * (geom.width + 1);
            for (x, &v) in row.iter().enumerate() {
                p[base + x + 1] = p[base + x] + u32::from(v == OCCUPIED);
            }
        }
        p
    };

    let mut cells = vec![FREE; geom.len()];
    exec.for_each_chunk_mut(&mut cells, geom.width, |y, row| {
        let y = y as i64;
        for (x, out) in row.iter_mut().enumerate() {
            let x = x as i64;
            let hit = spans.iter().enumerate().any(|(k, &half)| {
                if half < 0 {
                    return false;
                }
                let sy = y + k as i64 - reach;
                if sy < 0 || sy >= h {
                    return false;
                }
                let lo = (x - half).max(0) as usize;
                let hi = (x + half + 1).min(w) as usize;
                if lo >= hi {
                    return false;
                }
                let base = sy as usize * (geom.width + 1);
                prefix[base + hi] > prefix[base + lo]
            });
            if hit {
                *out = OCCUPIED;
            }
        }
    });
    BinaryGrid::from_raw(geom, cells)
}
