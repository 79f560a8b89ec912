//! LiDAR-only intruder detection for teams of patrol robots.
//!
//! The crate is organized bottom-up:
//!
//! - [`gridmap`]: occupancy grids, thresholding, inflation, map files.
//! - [`localview`]: per-robot background subtraction and blob boxes.
//! - [`fusion`]: ally removal and cross-robot merging of detections.
//! - [`sim`]: deterministic 2D world with ray-cast LiDAR and patrol logic.
//! - [`eval`]: frame scoring, metrics, and the two experiment drivers.
//!
//! Data-parallel loops go through [`Exec`]; with the `parallel` feature
//! disabled every policy runs sequentially and produces identical output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod eval;
pub mod exec;
pub mod fusion;
pub mod gridmap;
pub mod localview;
pub mod sim;

pub use error::{Error, Result};
pub use exec::Exec;
