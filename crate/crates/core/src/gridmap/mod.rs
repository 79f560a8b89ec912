//! Occupancy grids anchored in the world frame.
//!
//! Cell `(x, y)` is column `x`, row `y`; row 0 is the bottom of the map and
//! the grid origin is the world position of the lower-left corner of cell
//! `(0, 0)`. Image files store rows top-down, so readers and writers flip.

mod io;
mod ops;

pub use io::{load_map, read_pgm, save_map, write_pgm, MapMetadata, Pgm};
pub use ops::{disk_offsets, inflate, inflate_with, threshold};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cell value of an occupied cell in a [`BinaryGrid`].
pub const OCCUPIED: u8 = 0;
/// Cell value of a free (or unknown) cell in a [`BinaryGrid`].
pub const FREE: u8 = 255;
/// Highest cost a [`Costmap`] cell may carry.
pub const MAX_COST: u8 = 100;

// Absorbs representation error in quotients like 3.0 / 0.05 before flooring.
const FLOOR_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GridPoint {
    pub x: i64,
    pub y: i64,
}

impl GridPoint {
    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }
}

impl std::ops::Add for GridPoint {
    type Output = GridPoint;
    fn add(self, o: GridPoint) -> GridPoint {
        GridPoint::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for GridPoint {
    type Output = GridPoint;
    fn sub(self, o: GridPoint) -> GridPoint {
        GridPoint::new(self.x - o.x, self.y - o.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct WorldPoint {
    pub x: f64,
    pub y: f64,
}

impl WorldPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: WorldPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Size and world anchoring shared by every grid type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridGeometry {
    pub width: usize,
    pub height: usize,
    /// Meters per cell.
    pub resolution: f64,
    /// World position of the lower-left corner of cell (0, 0).
    pub origin: WorldPoint,
}

impl GridGeometry {
    pub fn new(width: usize, height: usize, resolution: f64, origin: WorldPoint) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid(
                "dimensions",
                format!("{width}x{height} has no cells"),
            ));
        }
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(Error::invalid(
                "resolution",
                format!("{resolution} is not positive"),
            ));
        }
        if !origin.is_finite() {
            return Err(Error::invalid("origin", "not finite"));
        }
        Ok(Self {
            width,
            height,
            resolution,
            origin,
        })
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cell containing `p`. The result may lie outside the grid.
    pub fn world_to_grid(&self, p: WorldPoint) -> GridPoint {
        let qx = (p.x - self.origin.x) / self.resolution;
        let qy = (p.y - self.origin.y) / self.resolution;
        GridPoint::new(
            (qx + FLOOR_EPS).floor() as i64,
            (qy + FLOOR_EPS).floor() as i64,
        )
    }

    /// World position of the center of cell `g`.
    pub fn grid_to_world(&self, g: GridPoint) -> WorldPoint {
        WorldPoint::new(
            self.origin.x + (g.x as f64 + 0.5) * self.resolution,
            self.origin.y + (g.y as f64 + 0.5) * self.resolution,
        )
    }

    pub fn contains(&self, g: GridPoint) -> bool {
        g.x >= 0 && g.y >= 0 && (g.x as usize) < self.width && (g.y as usize) < self.height
    }

    pub fn index(&self, g: GridPoint) -> Option<usize> {
        self.contains(g)
            .then(|| g.y as usize * self.width + g.x as usize)
    }

    /// Geometry of the `width x height` sub-window whose cell (0, 0) is `tl`
    /// in this grid.
    pub fn window(&self, tl: GridPoint, width: usize, height: usize) -> GridGeometry {
        GridGeometry {
            width,
            height,
            resolution: self.resolution,
            origin: WorldPoint::new(
                self.origin.x + tl.x as f64 * self.resolution,
                self.origin.y + tl.y as f64 * self.resolution,
            ),
        }
    }

    /// World extent as (min corner, max corner).
    pub fn extent(&self) -> (WorldPoint, WorldPoint) {
        (
            self.origin,
            WorldPoint::new(
                self.origin.x + self.width as f64 * self.resolution,
                self.origin.y + self.height as f64 * self.resolution,
            ),
        )
    }
}

/// Anything carrying a [`GridGeometry`].
pub trait Georeferenced {
    fn geometry(&self) -> &GridGeometry;
}

impl Georeferenced for GridGeometry {
    fn geometry(&self) -> &GridGeometry {
        self
    }
}

pub fn world_to_grid(p: WorldPoint, map: &impl Georeferenced) -> GridPoint {
    map.geometry().world_to_grid(p)
}

pub fn grid_to_world(g: GridPoint, map: &impl Georeferenced) -> WorldPoint {
    map.geometry().grid_to_world(g)
}

/// Cost grid with values in `0..=100`.
#[derive(Debug, Clone, PartialEq)]
pub struct Costmap {
    geometry: GridGeometry,
    cells: Vec<u8>,
}

impl Costmap {
    pub fn new(geometry: GridGeometry, cells: Vec<u8>) -> Result<Self> {
        if cells.len() != geometry.len() {
            return Err(Error::invalid(
                "cells",
                format!("expected {} cells, got {}", geometry.len(), cells.len()),
            ));
        }
        if let Some(v) = cells.iter().find(|&&v| v > MAX_COST) {
            return Err(Error::invalid(
                "cells",
                format!("cost {v} exceeds {MAX_COST}"),
            ));
        }
        Ok(Self { geometry, cells })
    }

    pub fn zeros(geometry: GridGeometry) -> Self {
        Self {
            cells: vec![0; geometry.len()],
            geometry,
        }
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn get(&self, g: GridPoint) -> Option<u8> {
        self.geometry.index(g).map(|i| self.cells[i])
    }

    /// Raise the cost at `g` to at least `cost`. Out-of-grid points are ignored.
    pub fn raise(&mut self, g: GridPoint, cost: u8) {
        if let Some(i) = self.geometry.index(g) {
            let c = cost.min(MAX_COST);
            if self.cells[i] < c {
                self.cells[i] = c;
            }
        }
    }
}

impl Georeferenced for Costmap {
    fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }
}

/// Black-and-white grid: [`OCCUPIED`] (0) or [`FREE`] (255) per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryGrid {
    geometry: GridGeometry,
    cells: Vec<u8>,
}

impl BinaryGrid {
    pub fn new(geometry: GridGeometry, cells: Vec<u8>) -> Result<Self> {
        if cells.len() != geometry.len() {
            return Err(Error::invalid(
                "cells",
                format!("expected {} cells, got {}", geometry.len(), cells.len()),
            ));
        }
        if let Some(v) = cells.iter().find(|&&v| v != OCCUPIED && v != FREE) {
            return Err(Error::invalid(
                "cells",
                format!("value {v} is not 0 or 255"),
            ));
        }
        Ok(Self { geometry, cells })
    }

    pub fn free(geometry: GridGeometry) -> Self {
        Self {
            cells: vec![FREE; geometry.len()],
            geometry,
        }
    }

    /// Build a grid from a predicate over cells; `true` marks the cell occupied.
    pub fn from_fn(geometry: GridGeometry, mut occupied: impl FnMut(GridPoint) -> bool) -> Self {
        let mut cells = Vec::with_capacity(geometry.len());
        for y in 0..geometry.height as i64 {
            for x in 0..geometry.width as i64 {
                cells.push(if occupied(GridPoint::new(x, y)) {
                    OCCUPIED
                } else {
                    FREE
                });
            }
        }
        Self { geometry, cells }
    }

    pub(crate) fn from_raw(geometry: GridGeometry, cells: Vec<u8>) -> Self {
        debug_assert_eq!(cells.len(), geometry.len());
        Self { geometry, cells }
    }

    pub fn width(&self) -> usize {
        self.geometry.width
    }

    pub fn height(&self) -> usize {
        self.geometry.height
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn get(&self, g: GridPoint) -> Option<u8> {
        self.geometry.index(g).map(|i| self.cells[i])
    }

    /// Out-of-grid cells count as free.
    pub fn is_occupied(&self, g: GridPoint) -> bool {
        self.get(g) == Some(OCCUPIED)
    }

    pub fn set(&mut self, g: GridPoint, value: u8) {
        assert!(
            value == OCCUPIED || value == FREE,
            "binary cell value must be 0 or 255"
        );
        if let Some(i) = self.geometry.index(g) {
            self.cells[i] = value;
        }
    }

    pub fn occupied_count(&self) -> usize {
        self.cells.iter().filter(|&&v| v == OCCUPIED).count()
    }

    pub fn occupied_cells(&self) -> impl Iterator<Item = GridPoint> + '_ {
        let w = self.geometry.width;
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == OCCUPIED)
            .map(move |(i, _)| GridPoint::new((i % w) as i64, (i / w) as i64))
    }

    /// Copy out the `width x height` block whose lower-left cell is `tl`.
    ///
    /// The block must lie inside the grid.
    pub fn crop(&self, tl: GridPoint, width: usize, height: usize) -> Result<BinaryGrid> {
        let br = tl + GridPoint::new(width as i64, height as i64);
        if tl.x < 0
            || tl.y < 0
            || br.x > self.geometry.width as i64
            || br.y > self.geometry.height as i64
        {
            return Err(Error::invalid(
                "crop",
                format!(
                    "block ({}, {})..({}, {}) exceeds {}x{} grid",
                    tl.x, tl.y, br.x, br.y, self.geometry.width, self.geometry.height
                ),
            ));
        }
        let geometry = GridGeometry::new(
            width,
            height,
            self.geometry.resolution,
            self.geometry.window(tl, width, height).origin,
        )?;
        let mut cells = Vec::with_capacity(width * height);
        for y in tl.y as usize..br.y as usize {
            let row = y * self.geometry.width;
            cells.extend_from_slice(&self.cells[row + tl.x as usize..row + br.x as usize]);
        }
        Ok(BinaryGrid { geometry, cells })
    }
}

impl Georeferenced for BinaryGrid {
    fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(w: usize, h: usize, r: f64, ox: f64, oy: f64) -> GridGeometry {
        GridGeometry::new(w, h, r, WorldPoint::new(ox, oy)).unwrap()
    }

    #[test]
    fn world_to_grid_examples() {
        let g = geom(200, 200, 0.05, -1.0, -1.0);
        assert_eq!(
            g.world_to_grid(WorldPoint::new(-1.0, -1.0)),
            GridPoint::new(0, 0)
        );
        assert_eq!(
            g.world_to_grid(WorldPoint::new(2.0, 1.0)),
            GridPoint::new(60, 40)
        );
        assert_eq!(
            g.world_to_grid(WorldPoint::new(-1.03, -1.0)),
            GridPoint::new(-1, 0)
        );
    }

    #[test]
    fn grid_to_world_examples() {
        let g = geom(4, 4, 1.0, 0.0, 0.0);
        assert_eq!(
            g.grid_to_world(GridPoint::new(0, 0)),
            WorldPoint::new(0.5, 0.5)
        );

        let g = geom(200, 200, 0.05, -1.0, -1.0);
        let w = g.grid_to_world(GridPoint::new(60, 40));
        assert!((w.x - 2.025).abs() < 1e-12 && (w.y - 1.025).abs() < 1e-12);
    }

    #[test]
    fn round_trip_every_cell() {
        let g = geom(37, 23, 0.05, -3.3, 1.7);
        for y in 0..23 {
            for x in 0..37 {
                let p = GridPoint::new(x, y);
                assert_eq!(g.world_to_grid(g.grid_to_world(p)), p);
            }
        }
    }

    #[test]
    fn rejects_bad_cells() {
        let g = geom(2, 2, 1.0, 0.0, 0.0);
        assert!(BinaryGrid::new(g, vec![0, 255, 7, 0]).is_err());
        assert!(BinaryGrid::new(g, vec![0, 255, 0]).is_err());
        assert!(Costmap::new(g, vec![0, 100, 101, 0]).is_err());
        assert!(GridGeometry::new(2, 2, 0.0, WorldPoint::default()).is_err());
    }

    #[test]
    fn crop_copies_block_and_shifts_origin() {
        let g = geom(5, 4, 0.5, 0.0, 0.0);
        let grid = BinaryGrid::from_fn(g, |p| p == GridPoint::new(3, 2));
        let c = grid.crop(GridPoint::new(2, 1), 2, 2).unwrap();
        assert_eq!(c.cells(), &[FREE, FREE, FREE, OCCUPIED]);
        assert_eq!(c.geometry().origin, WorldPoint::new(1.0, 0.5));
        assert!(grid.crop(GridPoint::new(4, 0), 2, 1).is_err());
    }
}
