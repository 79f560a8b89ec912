use super::{BBox, CropWindow};
use crate::gridmap::{BinaryGrid, GridPoint};

/// Value marking a changed cell in a difference grid.
pub const FOREGROUND: u8 = 255;

/// One 8-connected blob of foreground (255) cells, listed in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub cells: Vec<GridPoint>,
}

impl Component {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Tight half-open box in the component's own grid coordinates.
    pub fn bbox(&self) -> Option<BBox> {
        let first = self.cells.first()?;
        let (mut x1, mut y1, mut x2, mut y2) = (first.x, first.y, first.x, first.y);
        for c in &self.cells[1..] {
            x1 = x1.min(c.x);
            y1 = y1.min(c.y);
            x2 = x2.max(c.x);
            y2 = y2.max(c.y);
        }
        BBox::new(x1, y1, x2 + 1, y2 + 1)
    }
}

struct DisjointSet {
    parent: Vec<u32>,
}

impl DisjointSet {
    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        // keep the smaller label as root so roots follow raster order
        if ra < rb {
            self.parent[rb as usize] = ra;
        } else if rb < ra {
            self.parent[ra as usize] = rb;
        }
    }
}

/// Label the 8-connected components of the 255-cells of `d`.
///
/// Components are ordered by their first cell in row-major order.
pub fn connected_components(d: &BinaryGrid) -> Vec<Component> {
    let (w, h) = (d.width(), d.height());
    let cells = d.cells();
    const NONE: u32 = u32::MAX;
    let mut labels = vec![NONE; w * h];
    let mut ds = DisjointSet { parent: Vec::new() };

    // First pass: provisional labels from the already-visited neighbors
    // (W, NW, N, NE).
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if cells[i] != FOREGROUND {
                continue;
            }
            let mut label = NONE;
            let mut neighbors = [NONE; 4];
            if x > 0 {
                neighbors[0] = labels[i - 1];
            }
            if y > 0 {
                let up = i - w;
                if x > 0 {
                    neighbors[1] = labels[up - 1];
                }
                neighbors[2] = labels[up];
                if x + 1 < w {
                    neighbors[3] = labels[up + 1];
                }
            }
            for &n in neighbors.iter().filter(|&&n| n != NONE) {
                if label == NONE {
                    label = n;
                } else {
                    ds.union(label, n);
                }
            }
            if label == NONE {
                label = ds.parent.len() as u32;
                ds.parent.push(label);
            }
            labels[i] = label;
        }
    }

    // Second pass: resolve to roots and bucket cells by component.
    let mut slot_of_root = vec![NONE; ds.parent.len()];
    let mut out: Vec<Component> = Vec::new();
    for (i, &l) in labels.iter().enumerate() {
        if l == NONE {
            continue;
        }
        let root = ds.find(l) as usize;
        if slot_of_root[root] == NONE {
            slot_of_root[root] = out.len() as u32;
            out.push(Component { cells: Vec::new() });
        }
        out[slot_of_root[root] as usize]
            .cells
            .push(GridPoint::new((i % w) as i64, (i / w) as i64));
    }
    out
}

/// Tight boxes around each component, translated from local-grid cells
/// (the uncropped `A` frame) into global grid cells.
pub fn bounding_boxes(components: &[Component], window: &CropWindow) -> Vec<BBox> {
    let shift = window.local_to_global();
    components
        .iter()
        .filter_map(Component::bbox)
        .map(|b| b.translate(shift))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridmap::{GridGeometry, WorldPoint};

    fn d_grid(w: usize, h: usize, fg: &[(i64, i64)]) -> BinaryGrid {
        let g = GridGeometry::new(w, h, 0.05, WorldPoint::default()).unwrap();
        let mut cells = vec![0u8; w * h];
        for &(x, y) in fg {
            cells[y as usize * w + x as usize] = 255;
        }
        BinaryGrid::new(g, cells).unwrap()
    }

    fn window(shift: GridPoint) -> CropWindow {
        CropWindow {
            local_tl: GridPoint::new(0, 0),
            local_br: GridPoint::new(10, 10),
            global_tl: shift,
            global_br: shift + GridPoint::new(10, 10),
        }
    }

    #[test]
    fn empty_grid_has_no_components() {
        assert!(connected_components(&d_grid(5, 5, &[])).is_empty());
    }

    #[test]
    fn corner_touch_is_one_component() {
        let c = connected_components(&d_grid(5, 5, &[(1, 1), (2, 2)]));
        assert_eq!(c.len(), 1);
        let c = connected_components(&d_grid(5, 5, &[(2, 1), (1, 2)]));
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn gap_of_one_column_splits() {
        let c = connected_components(&d_grid(5, 5, &[(0, 0), (2, 0)]));
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn u_shape_merges_late() {
        // two arms joined only at the bottom row of the scan
        let fg = [
            (0, 0),
            (0, 1),
            (0, 2),
            (1, 2),
            (2, 2),
            (3, 2),
            (3, 1),
            (3, 0),
        ];
        let c = connected_components(&d_grid(5, 4, &fg));
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].len(), 8);
    }

    #[test]
    fn boxes_single_cell_and_l_shape() {
        let c = connected_components(&d_grid(10, 10, &[(5, 7)]));
        let b = bounding_boxes(&c, &window(GridPoint::new(0, 0)));
        assert_eq!(b, vec![BBox::new(5, 7, 6, 8).unwrap()]);

        let l = [(1, 2), (1, 3), (1, 4), (2, 4), (3, 4)];
        let c = connected_components(&d_grid(10, 10, &l));
        assert_eq!(
            bounding_boxes(&c, &window(GridPoint::new(0, 0))),
            vec![BBox::new(1, 2, 4, 5).unwrap()]
        );
        assert_eq!(
            bounding_boxes(&c, &window(GridPoint::new(100, 50))),
            vec![BBox::new(101, 52, 104, 55).unwrap()]
        );
    }
}
