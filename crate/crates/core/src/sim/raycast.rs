//! 2D LiDAR simulation by incremental grid traversal.

use serde::{Deserialize, Serialize};

use super::arena::Rect;
use crate::gridmap::{BinaryGrid, Georeferenced, GridGeometry, GridPoint, WorldPoint, OCCUPIED};

pub const LABEL_FREE: u16 = 0;
pub const LABEL_WALL: u16 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorSpec {
    pub beam_count: usize,
    /// Meters.
    pub max_range: f64,
    /// Frames per second.
    pub rate: f64,
    /// Standard deviation of additive range noise, meters.
    pub noise_sigma: f64,
}

impl Default for SensorSpec {
    fn default() -> Self {
        Self {
            beam_count: 360,
            max_range: 2.5,
            rate: 5.0,
            noise_sigma: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    /// Radians, counter-clockwise from +x.
    pub heading: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Self { x, y, heading }
    }

    pub fn position(&self) -> WorldPoint {
        WorldPoint::new(self.x, self.y)
    }
}

/// One sweep. Beam `k` points at `angle_min + k * angle_increment` (world
/// frame); ranges equal to `max_range` mean no return.
#[derive(Debug, Clone, PartialEq)]
pub struct Scan {
    pub angle_min: f64,
    pub angle_increment: f64,
    pub max_range: f64,
    pub ranges: Vec<f64>,
}

impl Scan {
    pub fn bearing(&self, k: usize) -> f64 {
        self.angle_min + k as f64 * self.angle_increment
    }
}

/// Per-cell owner labels: free, wall, or an entity label (>= 2).
#[derive(Debug, Clone)]
pub struct SceneGrid {
    geometry: GridGeometry,
    labels: Vec<u16>,
}

impl SceneGrid {
    pub fn from_static(grid: &BinaryGrid) -> Self {
        Self {
            geometry: *grid.geometry(),
            labels: grid
                .cells()
                .iter()
                .map(|&c| {
                    if c == OCCUPIED {
                        LABEL_WALL
                    } else {
                        LABEL_FREE
                    }
                })
                .collect(),
        }
    }

    pub fn label(&self, g: GridPoint) -> u16 {
        self.geometry
            .index(g)
            .map_or(LABEL_FREE, |i| self.labels[i])
    }

    fn stamp_where(
        &mut self,
        lo: WorldPoint,
        hi: WorldPoint,
        label: u16,
        inside: impl Fn(WorldPoint) -> bool,
    ) -> usize {
        let a = self.geometry.world_to_grid(lo);
        let b = self.geometry.world_to_grid(hi);
        let mut n = 0;
        for y in a.y..=b.y {
            for x in a.x..=b.x {
                let g = GridPoint::new(x, y);
                let Some(i) = self.geometry.index(g) else {
                    continue;
                };
                if inside(self.geometry.grid_to_world(g)) {
                    if self.labels[i] == LABEL_FREE {
                        self.labels[i] = label;
                    }
                    n += 1;
                }
            }
        }
        n
    }

    /// Mark free cells whose centers lie in the disc. A disc smaller than a
    /// cell still claims the cell holding its center.
    pub fn stamp_disc(&mut self, center: WorldPoint, radius: f64, label: u16) {
        let lo = WorldPoint::new(center.x - radius, center.y - radius);
        let hi = WorldPoint::new(center.x + radius, center.y + radius);
        let n = self.stamp_where(lo, hi, label, |p| p.distance(center) <= radius);
        if n == 0 {
            if let Some(i) = self.geometry.index(self.geometry.world_to_grid(center)) {
                if self.labels[i] == LABEL_FREE {
                    self.labels[i] = label;
                }
            }
        }
    }

    pub fn stamp_rect(&mut self, rect: &Rect, label: u16) {
        let n = self.stamp_where(rect.min, rect.max, label, |p| rect.contains(p));
        if n == 0 {
            self.stamp_disc(rect.center(), 0.0, label);
        }
    }
}

impl Georeferenced for SceneGrid {
    fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }
}

/// Distance along the ray to the first cell not free and not labeled
/// `ignore`, capped at `max_range`.
pub fn cast_ray(
    scene: &SceneGrid,
    from: WorldPoint,
    angle: f64,
    max_range: f64,
    ignore: u16,
) -> f64 {
    let g = &scene.geometry;
    let px = (from.x - g.origin.x) / g.resolution;
    let py = (from.y - g.origin.y) / g.resolution;
    let (dx, dy) = (angle.cos(), angle.sin());
    let mut cell = GridPoint::new(px.floor() as i64, py.floor() as i64);
    let blocked = |c: GridPoint| {
        let l = scene.label(c);
        l != LABEL_FREE && l != ignore
    };
    if blocked(cell) {
        return 0.0;
    }

    let axis = |p: f64, d: f64, c: i64| -> (i64, f64, f64) {
        if d > 0.0 {
            (1, ((c + 1) as f64 - p) / d, 1.0 / d)
        } else if d < 0.0 {
            (-1, (c as f64 - p) / d, -1.0 / d)
        } else {
            (0, f64::INFINITY, f64::INFINITY)
        }
    };
    let (sx, mut tx, ddx) = axis(px, dx, cell.x);
    let (sy, mut ty, ddy) = axis(py, dy, cell.y);
    let t_end = max_range / g.resolution;

    loop {
        let t = if tx < ty {
            cell.x += sx;
            let t = tx;
            tx += ddx;
            t
        } else {
            cell.y += sy;
            let t = ty;
            ty += ddy;
            t
        };
        if t >= t_end || !g.contains(cell) {
            return max_range;
        }
        if blocked(cell) {
            return t * g.resolution;
        }
    }
}

/// Noise-free sweep from `pose`, ignoring cells labeled `ignore` (the
/// sensing robot's own body).
pub fn raycast(scene: &SceneGrid, pose: &Pose, spec: &SensorSpec, ignore: u16) -> Scan {
    let inc = std::f64::consts::TAU / spec.beam_count as f64;
    let from = pose.position();
    let ranges = (0..spec.beam_count)
        .map(|k| {
            cast_ray(
                scene,
                from,
                pose.heading + k as f64 * inc,
                spec.max_range,
                ignore,
            )
        })
        .collect();
    Scan {
        angle_min: pose.heading,
        angle_increment: inc,
        max_range: spec.max_range,
        ranges,
    }
}
