use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::gridmap::{BinaryGrid, Georeferenced, GridPoint};

const SQRT2: f64 = std::f64::consts::SQRT_2;

// (dx, dy, cost) for the 8-neighborhood.
const MOVES: [(i64, i64, f64); 8] = [
    (1, 0, 1.0),
    (-1, 0, 1.0),
    (0, 1, 1.0),
    (0, -1, 1.0),
    (1, 1, SQRT2),
    (1, -1, SQRT2),
    (-1, 1, SQRT2),
    (-1, -1, SQRT2),
];

#[derive(PartialEq)]
struct Open {
    f: f64,
    idx: usize,
}

impl Eq for Open {}

impl Ord for Open {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| other.idx.cmp(&self.idx))
    }
}

impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn octile(a: GridPoint, b: GridPoint) -> f64 {
    let dx = (a.x - b.x).abs() as f64;
    let dy = (a.y - b.y).abs() as f64;
    dx.max(dy) + (SQRT2 - 1.0) * dx.min(dy)
}

/// Cost of a path in octile steps.
pub fn path_cost(path: &[GridPoint]) -> f64 {
    path.windows(2).map(|w| octile(w[0], w[1])).sum()
}

/// Shortest 8-connected path over free cells of `grid`, start and goal
/// included.
///
/// Diagonal moves need both adjacent orthogonal cells free. The start cell
/// may be occupied (a robot that drifted into the inflated band can still
/// leave it); the goal must be free.
pub fn plan_path(grid: &BinaryGrid, start: GridPoint, goal: GridPoint) -> Result<Vec<GridPoint>> {
    let geom = grid.geometry();
    let no_path = || Error::NoPath {
        sx: start.x,
        sy: start.y,
        gx: goal.x,
        gy: goal.y,
    };
    if !geom.contains(start) || !geom.contains(goal) || grid.is_occupied(goal) {
        return Err(no_path());
    }
    if start == goal {
        return Ok(vec![start]);
    }

    let w = geom.width;
    let to_point = |i: usize| GridPoint::new((i % w) as i64, (i / w) as i64);
    let free = |p: GridPoint| geom.contains(p) && !grid.is_occupied(p);

    let n = geom.len();
    let mut g_cost = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut closed = vec![false; n];
    let s = geom.index(start).unwrap();
    let t = geom.index(goal).unwrap();
    g_cost[s] = 0.0;
    let mut open = BinaryHeap::new();
    open.push(Open {
        f: octile(start, goal),
        idx: s,
    });

    while let Some(Open { idx, .. }) = open.pop() {
        if closed[idx] {
            continue;
        }
        if idx == t {
            let mut path = vec![goal];
            let mut cur = idx;
            while cur != s {
                cur = parent[cur];
                path.push(to_point(cur));
            }
            path.reverse();
            return Ok(path);
        }
        closed[idx] = true;
        let p = to_point(idx);
        for &(dx, dy, c) in &MOVES {
            let q = GridPoint::new(p.x + dx, p.y + dy);
            if !free(q) {
                continue;
            }
            if dx != 0
                && dy != 0
                && !(free(GridPoint::new(p.x + dx, p.y)) && free(GridPoint::new(p.x, p.y + dy)))
            {
                continue;
            }
            let qi = geom.index(q).unwrap();
            let ng = g_cost[idx] + c;
            if ng < g_cost[qi] {
                g_cost[qi] = ng;
                parent[qi] = idx;
                open.push(Open {
                    f: ng + octile(q, goal),
                    idx: qi,
                });
            }
        }
    }
    Err(no_path())
}
