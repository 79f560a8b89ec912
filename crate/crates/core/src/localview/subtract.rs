use crate::error::{Error, Result};
use crate::gridmap::{BinaryGrid, Georeferenced};

fn same_shape(a: &BinaryGrid, b: &BinaryGrid) -> Result<()> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::ShapeMismatch {
            left_w: a.width(),
            left_h: a.height(),
            right_w: b.width(),
            right_h: b.height(),
        });
    }
    Ok(())
}

/// Cellwise OR: occupied (0) only where both inputs are occupied.
pub fn or_merge(a: &BinaryGrid, b: &BinaryGrid) -> Result<BinaryGrid> {
    same_shape(a, b)?;
    let cells = a
        .cells()
        .iter()
        .zip(b.cells())
        .map(|(x, y)| x | y)
        .collect();
    Ok(BinaryGrid::from_raw(*a.geometry(), cells))
}

/// Cellwise absolute difference. The result keeps `a`'s geometry.
pub fn abs_diff(a: &BinaryGrid, c: &BinaryGrid) -> Result<BinaryGrid> {
    same_shape(a, c)?;
    let cells = a
        .cells()
        .iter()
        .zip(c.cells())
        .map(|(x, y)| x.abs_diff(*y))
        .collect();
    Ok(BinaryGrid::from_raw(*a.geometry(), cells))
}
