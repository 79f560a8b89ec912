//! Deterministic stand-in for the robots' physical world.
//!
//! A [`WorldModel`] holds the arena, the security robots and the intruders.
//! Time advances in fixed steps; every `1 / rate` seconds a sensor frame is
//! due, at which point [`WorldModel::perceive`] ray-casts every robot's
//! LiDAR, builds its local costmap and runs detection and fusion. All
//! randomness comes from the world's seeded generator.

mod arena;
mod patrol;
mod planner;
mod raycast;
mod sensing;
mod world;

pub use arena::{Arena, Door, Rect, WALL_THICKNESS};
pub use patrol::{gen_patrol_goal, safe_distance, PatrolArea, PatrolGoal};
pub use planner::{path_cost, plan_path};
pub use raycast::{cast_ray, raycast, Pose, Scan, SceneGrid, SensorSpec, LABEL_FREE, LABEL_WALL};
pub use sensing::{local_window_cells, scan_to_costmap, InflationProfile};
pub use world::{
    build_global_maps, make_map1, make_map2, EntityRef, Event, EventKind, Footprint,
    IntruderBehavior, IntruderState, MapBundle, Mode, Perception, RobotState, SimConfig,
    WorldModel,
};
