use crate::error::{Error, Result};
use crate::gridmap::GridPoint;

/// Matching crop rectangles in the local and global grids.
///
/// `*_tl` is the minimum corner (inclusive) and `*_br` the maximum corner
/// (exclusive) of each rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CropWindow {
    pub local_tl: GridPoint,
    pub local_br: GridPoint,
    pub global_tl: GridPoint,
    pub global_br: GridPoint,
}

impl CropWindow {
    /// Common `(width, height)` of both rectangles.
    pub fn span(&self) -> (i64, i64) {
        (
            self.local_br.x - self.local_tl.x,
            self.local_br.y - self.local_tl.y,
        )
    }

    /// Offset mapping a local-grid cell to its global-grid cell.
    pub fn local_to_global(&self) -> GridPoint {
        self.global_tl - self.local_tl
    }
}

/// Corners of a `local_w x local_l` window centered on `center`.
///
/// With odd extents the center sits at index `extent / 2` of the window.
pub fn crop_coords(center: GridPoint, local_w: i64, local_l: i64) -> (GridPoint, GridPoint) {
    let tl = GridPoint::new(center.x - local_w / 2, center.y - local_l / 2);
    (tl, GridPoint::new(tl.x + local_w, tl.y + local_l))
}

/// Clamp a crop window against the global grid so that the local and global
/// rectangles stay in bounds and keep equal extents.
pub fn clamp_crop(
    tl: GridPoint,
    br: GridPoint,
    global_dims: (i64, i64),
    local_dims: (i64, i64),
) -> Result<CropWindow> {
    let (gw, gh) = global_dims;
    let (lw, lh) = local_dims;
    if br.x - tl.x != lw || br.y - tl.y != lh {
        return Err(Error::invalid(
            "window",
            format!(
                "corners span {}x{} but local grid is {lw}x{lh}",
                br.x - tl.x,
                br.y - tl.y
            ),
        ));
    }

    let mut w = CropWindow {
        local_tl: GridPoint::new(0, 0),
        local_br: GridPoint::new(lw, lh),
        global_tl: tl,
        global_br: br,
    };
    if tl.x < 0 {
        w.local_tl.x = tl.x.abs();
        w.global_tl.x = 0;
    }
    if tl.y < 0 {
        w.local_tl.y = tl.y.abs();
        w.global_tl.y = 0;
    }
    if br.x > gw {
        w.local_br.x = lw - (br.x - gw);
        w.global_br.x = gw;
    }
    if br.y > gh {
        w.local_br.y = lh - (br.y - gh);
        w.global_br.y = gh;
    }

    let (sx, sy) = w.span();
    let off_grid = w.global_tl.x > gw
        || w.global_tl.y > gh
        || w.global_br.x < 0
        || w.global_br.y < 0
        || sx < 0
        || sy < 0
        || (sx == 0 && lw > 0)
        || (sy == 0 && lh > 0);
    if off_grid {
        return Err(Error::EmptyWindow {
            width: gw,
            height: gh,
        });
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gp(x: i64, y: i64) -> GridPoint {
        GridPoint::new(x, y)
    }

    #[test]
    fn crop_coords_examples() {
        assert_eq!(
            crop_coords(gp(100, 100), 100, 100),
            (gp(50, 50), gp(150, 150))
        );
        assert_eq!(crop_coords(gp(0, 0), 100, 100), (gp(-50, -50), gp(50, 50)));
        assert_eq!(crop_coords(gp(7, 9), 0, 0), (gp(7, 9), gp(7, 9)));
        assert_eq!(crop_coords(gp(10, 10), 5, 3), (gp(8, 9), gp(13, 12)));
    }

    #[test]
    fn fully_inside_passes_through() {
        let w = clamp_crop(gp(50, 50), gp(150, 150), (400, 400), (100, 100)).unwrap();
        assert_eq!(w.local_tl, gp(0, 0));
        assert_eq!(w.local_br, gp(100, 100));
        assert_eq!(w.global_tl, gp(50, 50));
        assert_eq!(w.global_br, gp(150, 150));
    }

    #[test]
    fn negative_left_edge() {
        let w = clamp_crop(gp(-10, 20), gp(90, 120), (400, 400), (100, 100)).unwrap();
        assert_eq!(w.local_tl.x, 10);
        assert_eq!(w.global_tl.x, 0);
        assert_eq!(w.span(), (90, 100));
    }

    #[test]
    fn right_overshoot_shrinks_local_extent() {
        let gw = 300;
        let w = clamp_crop(gp(gw + 7 - 100, 0), gp(gw + 7, 100), (gw, 300), (100, 100)).unwrap();
        assert_eq!(w.local_br.x, 93);
        assert_eq!(w.global_br.x, gw);
    }

    #[test]
    fn local_larger_than_global() {
        let w = clamp_crop(gp(-20, -30), gp(80, 70), (50, 40), (100, 100)).unwrap();
        assert_eq!(w.global_tl, gp(0, 0));
        assert_eq!(w.global_br, gp(50, 40));
        assert_eq!(w.local_tl, gp(20, 30));
        assert_eq!(w.local_br, gp(70, 70));
        assert_eq!(w.span(), (50, 40));
    }

    #[test]
    fn off_map_window_is_error() {
        let err = clamp_crop(gp(500, 0), gp(600, 100), (400, 400), (100, 100)).unwrap_err();
        assert!(matches!(err, Error::EmptyWindow { .. }));
        assert!(clamp_crop(gp(-100, 0), gp(0, 100), (400, 400), (100, 100)).is_err());
        assert!(clamp_crop(gp(0, 0), gp(10, 10), (400, 400), (20, 10)).is_err());
    }
}
