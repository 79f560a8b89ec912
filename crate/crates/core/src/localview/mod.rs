//! Per-robot background subtraction against the prior map.
//!
//! A robot's live local grid `A` is compared with the matching crop `B` of
//! the prior global grid: `C = A | B` keeps what both agree is occupied,
//! `D = |A - C|` lights up cells occupied now but free in the prior. The
//! 8-connected blobs of `D` become bounding boxes in global grid cells.

mod bbox;
mod components;
mod crop;
mod pipeline;
mod subtract;

pub use bbox::BBox;
pub use components::{bounding_boxes, connected_components, Component, FOREGROUND};
pub use crop::{clamp_crop, crop_coords, CropWindow};
pub use pipeline::{process_frame, LocalFrame, LocalPipeline};
pub use subtract::{abs_diff, or_merge};
