use crate::gridmap::GridPoint;

/// Axis-aligned box over global grid cells, half-open: `[x1, x2) x [y1, y2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BBox {
    pub x1: i64,
    pub y1: i64,
    pub x2: i64,
    pub y2: i64,
}

impl BBox {
    /// Returns `None` for empty boxes.
    pub fn new(x1: i64, y1: i64, x2: i64, y2: i64) -> Option<Self> {
        (x1 < x2 && y1 < y2).then_some(Self { x1, y1, x2, y2 })
    }

    /// Tight box around a single cell.
    pub fn cell(p: GridPoint) -> Self {
        Self {
            x1: p.x,
            y1: p.y,
            x2: p.x + 1,
            y2: p.y + 1,
        }
    }

    pub fn width(&self) -> i64 {
        self.x2 - self.x1
    }

    pub fn height(&self) -> i64 {
        self.y2 - self.y1
    }

    pub fn area(&self) -> i64 {
        self.width() * self.height()
    }

    pub fn intersection(&self, other: &BBox) -> Option<BBox> {
        BBox::new(
            self.x1.max(other.x1),
            self.y1.max(other.y1),
            self.x2.min(other.x2),
            self.y2.min(other.y2),
        )
    }

    pub fn intersection_area(&self, other: &BBox) -> i64 {
        self.intersection(other).map_or(0, |b| b.area())
    }

    pub fn intersects(&self, other: &BBox) -> bool {
        self.intersection(other).is_some()
    }

    pub fn contains(&self, p: GridPoint) -> bool {
        p.x >= self.x1 && p.x < self.x2 && p.y >= self.y1 && p.y < self.y2
    }

    pub fn translate(&self, d: GridPoint) -> BBox {
        BBox {
            x1: self.x1 + d.x,
            y1: self.y1 + d.y,
            x2: self.x2 + d.x,
            y2: self.y2 + d.y,
        }
    }

    /// Center in (fractional) cell units.
    pub fn center(&self) -> (f64, f64) {
        (
            (self.x1 + self.x2) as f64 / 2.0,
            (self.y1 + self.y2) as f64 / 2.0,
        )
    }
}
