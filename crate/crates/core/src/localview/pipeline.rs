use super::{
    abs_diff, bounding_boxes, clamp_crop, connected_components, crop_coords, or_merge, BBox,
    CropWindow,
};
use crate::error::Result;
use crate::fusion::RobotId;
use crate::gridmap::{BinaryGrid, Georeferenced, WorldPoint};

/// Everything one robot produced for one sensor frame.
///
/// `a`, `b`, `c` and `d` all have the window's span as dimensions.
#[derive(Debug, Clone)]
pub struct LocalFrame {
    pub robot_id: RobotId,
    pub window: CropWindow,
    /// Live local view, cropped to the window.
    pub a: BinaryGrid,
    /// Prior global map cropped to the window.
    pub b: BinaryGrid,
    /// `a | b`.
    pub c: BinaryGrid,
    /// `|a - c|`; 255 marks cells occupied now but free in the prior.
    pub d: BinaryGrid,
    /// Detections in global grid cells.
    pub boxes: Vec<BBox>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalPipeline {
    /// Components smaller than this many cells are dropped.
    pub min_blob_cells: usize,
}

impl Default for LocalPipeline {
    fn default() -> Self {
        Self { min_blob_cells: 1 }
    }
}

impl LocalPipeline {
    /// Run background subtraction for one robot.
    ///
    /// `local` is the robot-centered window whose cell grid is aligned with
    /// `global`; `pose` is the robot position in world coordinates.
    pub fn process(
        &self,
        local: &BinaryGrid,
        global: &BinaryGrid,
        pose: WorldPoint,
        robot_id: RobotId,
    ) -> Result<LocalFrame> {
        let center = global.geometry().world_to_grid(pose);
        let (lw, lh) = (local.width() as i64, local.height() as i64);
        let (tl, br) = crop_coords(center, lw, lh);
        let window = clamp_crop(
            tl,
            br,
            (global.width() as i64, global.height() as i64),
            (lw, lh),
        )?;
        let (sx, sy) = window.span();
        let a = local.crop(window.local_tl, sx as usize, sy as usize)?;
        let b = global.crop(window.global_tl, sx as usize, sy as usize)?;
        let c = or_merge(&a, &b)?;
        let d = abs_diff(&a, &c)?;

        let mut components = connected_components(&d);
        components.retain(|comp| comp.len() >= self.min_blob_cells);
        for comp in &mut components {
            for cell in &mut comp.cells {
                *cell = *cell + window.local_tl;
            }
        }
        let boxes = bounding_boxes(&components, &window);
        Ok(LocalFrame {
            robot_id,
            window,
            a,
            b,
            c,
            d,
            boxes,
        })
    }
}

/// [`LocalPipeline::process`] with default settings.
pub fn process_frame(
    local: &BinaryGrid,
    global: &BinaryGrid,
    pose: WorldPoint,
    robot_id: RobotId,
) -> Result<LocalFrame> {
    LocalPipeline::default().process(local, global, pose, robot_id)
}
