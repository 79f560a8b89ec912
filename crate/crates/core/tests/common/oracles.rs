//! Brute-force reference implementations used by the property tests and the
//! acceptance run. They share no code with the library beyond its data types.
#![allow(dead_code)]

use std::collections::{BinaryHeap, VecDeque};

use sentry_core::gridmap::{BinaryGrid, GridPoint, OCCUPIED};
use sentry_core::localview::BBox;

/// IoU by enumerating every cell of both boxes.
pub fn iou_raster(a: &BBox, b: &BBox) -> f64 {
    let (x0, y0) = (a.x1.min(b.x1), a.y1.min(b.y1));
    let (x1, y1) = (a.x2.max(b.x2), a.y2.max(b.y2));
    let inside = |bb: &BBox, x: i64, y: i64| x >= bb.x1 && x < bb.x2 && y >= bb.y1 && y < bb.y2;
    let (mut both, mut either) = (0u64, 0u64);
    for y in y0..y1 {
        for x in x0..x1 {
            let (ia, ib) = (inside(a, x, y), inside(b, x, y));
            both += (ia && ib) as u64;
            either += (ia || ib) as u64;
        }
    }
    if either == 0 {
        0.0
    } else {
        both as f64 / either as f64
    }
}

/// 8-connected components of 255-cells by breadth-first flood fill, each
/// sorted row-major, components ordered by their first cell.
pub fn flood_fill(w: usize, h: usize, cells: &[u8]) -> Vec<Vec<(usize, usize)>> {
    let mut seen = vec![false; w * h];
    let mut out = Vec::new();
    for start in 0..w * h {
        if cells[start] != 255 || seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = Vec::new();
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let (x, y) = ((i % w) as i64, (i / w) as i64);
            comp.push((x as usize, y as usize));
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let j = ny as usize * w + nx as usize;
                    if cells[j] == 255 && !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
        comp.sort_by_key(|&(x, y)| (y, x));
        out.push(comp);
    }
    out
}

/// Local and global corners of a crop, each as `(x, y)`.
pub type CropCorners = ((i64, i64), (i64, i64), (i64, i64), (i64, i64));

/// Expected crop: the intersection of the requested window with the global
/// grid, expressed in both frames. `None` when they do not overlap.
pub fn crop_oracle(tl: (i64, i64), dims: (i64, i64), global: (i64, i64)) -> Option<CropCorners> {
    let gx0 = tl.0.max(0);
    let gy0 = tl.1.max(0);
    let gx1 = (tl.0 + dims.0).min(global.0);
    let gy1 = (tl.1 + dims.1).min(global.1);
    if gx0 >= gx1 || gy0 >= gy1 {
        return None;
    }
    Some((
        (gx0 - tl.0, gy0 - tl.1),
        (gx1 - tl.0, gy1 - tl.1),
        (gx0, gy0),
        (gx1, gy1),
    ))
}

/// Per-cell expectation for `abs_diff(a, or_merge(a, b))`.
pub fn diff_cell(a: u8, b: u8) -> u8 {
    if a == 0 && b == 255 {
        255
    } else {
        0
    }
}

#[derive(PartialEq)]
struct Node(f64, usize);
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Node {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
    }
}

/// Shortest 8-connected path cost by plain Dijkstra. Diagonal steps need
/// both side cells free; the start cell may be occupied.
pub fn dijkstra_cost(grid: &BinaryGrid, start: GridPoint, goal: GridPoint) -> Option<f64> {
    let (w, h) = (grid.width() as i64, grid.height() as i64);
    let free = |x: i64, y: i64| {
        x >= 0 && y >= 0 && x < w && y < h && grid.cells()[(y * w + x) as usize] != OCCUPIED
    };
    if !free(goal.x, goal.y) {
        return None;
    }
    let idx = |x: i64, y: i64| (y * w + x) as usize;
    let mut dist = vec![f64::INFINITY; (w * h) as usize];
    let mut heap = BinaryHeap::new();
    dist[idx(start.x, start.y)] = 0.0;
    heap.push(Node(0.0, idx(start.x, start.y)));
    while let Some(Node(d, i)) = heap.pop() {
        if d > dist[i] {
            continue;
        }
        let (x, y) = (i as i64 % w, i as i64 / w);
        if (x, y) == (goal.x, goal.y) {
            return Some(d);
        }
        for dy in -1..=1i64 {
            for dx in -1..=1i64 {
                if (dx, dy) == (0, 0) || !free(x + dx, y + dy) {
                    continue;
                }
                if dx != 0 && dy != 0 && !(free(x + dx, y) && free(x, y + dy)) {
                    continue;
                }
                let step = if dx != 0 && dy != 0 {
                    std::f64::consts::SQRT_2
                } else {
                    1.0
                };
                let j = idx(x + dx, y + dy);
                if d + step < dist[j] {
                    dist[j] = d + step;
                    heap.push(Node(d + step, j));
                }
            }
        }
    }
    None
}

/// Number of connected components of the graph linking boxes whose IoU
/// reaches `t`.
pub fn cluster_count(boxes: &[BBox], t: f64) -> usize {
    let n = boxes.len();
    let mut seen = vec![false; n];
    let mut count = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if !seen[j] && iou_raster(&boxes[i], &boxes[j]) >= t {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    count
}

/// Distance along a ray to the first occupied cell square, by slab tests
/// against every occupied cell. `None` when nothing is hit within `max`.
pub fn ray_oracle(
    grid: &BinaryGrid,
    origin: (f64, f64),
    resolution: f64,
    from: (f64, f64),
    angle: f64,
    max: f64,
) -> Option<f64> {
    let (dx, dy) = (angle.cos(), angle.sin());
    let mut best: Option<f64> = None;
    for g in grid.occupied_cells() {
        let x0 = origin.0 + g.x as f64 * resolution;
        let y0 = origin.1 + g.y as f64 * resolution;
        let (x1, y1) = (x0 + resolution, y0 + resolution);
        let (mut lo, mut hi) = (0.0f64, max);
        for (p, d, a, b) in [(from.0, dx, x0, x1), (from.1, dy, y0, y1)] {
            if d.abs() < 1e-15 {
                if p < a || p > b {
                    lo = f64::INFINITY;
                }
            } else {
                let (t0, t1) = ((a - p) / d, (b - p) / d);
                lo = lo.max(t0.min(t1));
                hi = hi.min(t0.max(t1));
            }
        }
        if lo <= hi && best.is_none_or(|b| lo < b) {
            best = Some(lo);
        }
    }
    best
}
