use crate::error::{Error, Result};
use crate::gridmap::{BinaryGrid, Costmap, Georeferenced, GridGeometry, GridPoint, WorldPoint};

/// Axis-aligned rectangle in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min: WorldPoint,
    pub max: WorldPoint,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        if !(x0 < x1 && y0 < y1) {
            return Err(Error::invalid(
                "rect",
                format!("({x0}, {y0})..({x1}, {y1}) is degenerate"),
            ));
        }
        Ok(Self {
            min: WorldPoint::new(x0, y0),
            max: WorldPoint::new(x1, y1),
        })
    }

    /// Rectangle of size `w x l` centered on `c`.
    pub fn centered(c: WorldPoint, w: f64, l: f64) -> Result<Self> {
        Self::new(c.x - w / 2.0, c.y - l / 2.0, c.x + w / 2.0, c.y + l / 2.0)
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn center(&self) -> WorldPoint {
        WorldPoint::new(
            (self.min.x + self.max.x) / 2.0,
            (self.min.y + self.max.y) / 2.0,
        )
    }

    pub fn contains(&self, p: WorldPoint) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    /// Euclidean distance from `p` to the rectangle (0 inside).
    pub fn distance(&self, p: WorldPoint) -> f64 {
        let dx = (self.min.x - p.x).max(0.0).max(p.x - self.max.x);
        let dy = (self.min.y - p.y).max(0.0).max(p.y - self.max.y);
        dx.hypot(dy)
    }

    pub fn shrink(&self, margin: f64) -> Result<Self> {
        Self::new(
            self.min.x + margin,
            self.min.y + margin,
            self.max.x - margin,
            self.max.y - margin,
        )
    }
}

/// Opening in the boundary wall.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Door {
    pub a: WorldPoint,
    pub b: WorldPoint,
}

/// Static layout of a testbed.
#[derive(Debug, Clone, PartialEq)]
pub struct Arena {
    pub name: String,
    /// Extent of the ground plane; the global grid covers exactly this.
    pub ground: Rect,
    pub walls: Vec<Rect>,
    pub doors: Vec<Door>,
    /// Free interior that robots patrol and intruders roam.
    pub patrol_region: Rect,
    /// Nominal size of the enclosed area (meters).
    pub enclosure: (f64, f64),
    /// Pre-rasterized obstacles, for maps loaded from file.
    pub base: Option<BinaryGrid>,
}

pub const WALL_THICKNESS: f64 = 0.1;

fn square_enclosure(half: f64, door_half_width: Option<f64>) -> Vec<Rect> {
    let t = WALL_THICKNESS / 2.0;
    let (lo, hi) = (-half - t, half + t);
    let mut walls = vec![
        Rect::new(lo, lo, hi, -half + t).unwrap(),
        Rect::new(lo, half - t, hi, hi).unwrap(),
    ];
    for x in [-half, half] {
        match door_half_width {
            None => walls.push(Rect::new(x - t, lo, x + t, hi).unwrap()),
            Some(d) => {
                walls.push(Rect::new(x - t, lo, x + t, -d).unwrap());
                walls.push(Rect::new(x - t, d, x + t, hi).unwrap());
            }
        }
    }
    walls
}

impl Arena {
    /// 8 m x 8 m ground with a closed 6 m x 6 m enclosure centered on it.
    pub fn map1() -> Self {
        let t = WALL_THICKNESS / 2.0;
        Self {
            name: "map1".into(),
            ground: Rect::new(-4.0, -4.0, 4.0, 4.0).unwrap(),
            walls: square_enclosure(3.0, None),
            doors: Vec::new(),
            patrol_region: Rect::new(-3.0 + t, -3.0 + t, 3.0 - t, 3.0 - t).unwrap(),
            enclosure: (6.0, 6.0),
            base: None,
        }
    }

    /// 24 m x 24 m ground with a 20 m x 20 m boundary wall and a door of
    /// `door_width` meters centered on the left and right sides.
    pub fn map2_with_door(door_width: f64) -> Result<Self> {
        if !(door_width > 0.0 && door_width < 20.0) {
            return Err(Error::invalid("door_width", format!("{door_width} m")));
        }
        let t = WALL_THICKNESS / 2.0;
        let d = door_width / 2.0;
        Ok(Self {
            name: "map2".into(),
            ground: Rect::new(-12.0, -12.0, 12.0, 12.0).unwrap(),
            walls: square_enclosure(10.0, Some(d)),
            doors: vec![
                Door {
                    a: WorldPoint::new(-10.0, -d),
                    b: WorldPoint::new(-10.0, d),
                },
                Door {
                    a: WorldPoint::new(10.0, -d),
                    b: WorldPoint::new(10.0, d),
                },
            ],
            patrol_region: Rect::new(-10.0 + t, -10.0 + t, 10.0 - t, 10.0 - t).unwrap(),
            enclosure: (20.0, 20.0),
            base: None,
        })
    }

    pub fn map2() -> Self {
        Self::map2_with_door(1.0).expect("default door fits")
    }

    /// Arena backed by a loaded occupancy grid; the whole grid is patrolled.
    pub fn from_grid(name: impl Into<String>, grid: BinaryGrid) -> Self {
        let (lo, hi) = grid.geometry().extent();
        let ground = Rect { min: lo, max: hi };
        Self {
            name: name.into(),
            ground,
            walls: Vec::new(),
            doors: Vec::new(),
            patrol_region: ground,
            enclosure: (ground.width(), ground.height()),
            base: Some(grid),
        }
    }

    /// Length of the diagonal of the enclosed area.
    pub fn enclosure_diagonal(&self) -> f64 {
        self.enclosure.0.hypot(self.enclosure.1)
    }

    pub fn geometry(&self, resolution: f64) -> Result<GridGeometry> {
        if let Some(base) = &self.base {
            let g = *base.geometry();
            if (g.resolution - resolution).abs() > 1e-12 {
                return Err(Error::invalid(
                    "resolution",
                    format!(
                        "map file is at {} m/cell, requested {resolution}",
                        g.resolution
                    ),
                ));
            }
            return Ok(g);
        }
        let w = (self.ground.width() / resolution).round() as usize;
        let h = (self.ground.height() / resolution).round() as usize;
        GridGeometry::new(w, h, resolution, self.ground.min)
    }

    /// Walls as a costmap: 100 where a cell center lies in a wall, else 0.
    pub fn rasterize(&self, resolution: f64) -> Result<Costmap> {
        let geom = self.geometry(resolution)?;
        let mut cells = vec![0u8; geom.len()];
        if let Some(base) = &self.base {
            for (c, &b) in cells.iter_mut().zip(base.cells()) {
                if b == crate::gridmap::OCCUPIED {
                    *c = 100;
                }
            }
        }
        for wall in &self.walls {
            let lo = geom.world_to_grid(wall.min);
            let hi = geom.world_to_grid(wall.max);
            for y in lo.y.max(0)..=hi.y.min(geom.height as i64 - 1) {
                for x in lo.x.max(0)..=hi.x.min(geom.width as i64 - 1) {
                    let g = GridPoint::new(x, y);
                    if wall.contains(geom.grid_to_world(g)) {
                        cells[geom.index(g).unwrap()] = 100;
                    }
                }
            }
        }
        Costmap::new(geom, cells)
    }
}
