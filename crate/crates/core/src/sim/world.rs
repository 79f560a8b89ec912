use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::arena::{Arena, Rect};
use super::patrol::{gen_patrol_goal, safe_distance, PatrolArea};
use super::planner::plan_path;
use super::raycast::{raycast, Pose, Scan, SceneGrid, SensorSpec};
use super::sensing::{local_window_cells, scan_to_costmap, InflationProfile};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fusion::{
    merge_all_with, remove_ally_detections, Detection, FusionConfig, RobotId, RobotRecord,
    RobotRoster,
};
use crate::gridmap::{
    inflate_with, threshold, BinaryGrid, Georeferenced, GridGeometry, GridPoint, WorldPoint,
    OCCUPIED,
};
use crate::localview::{BBox, LocalFrame, LocalPipeline};

/// Tunables of the simulated world and the detection pipeline it drives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    /// Meters per grid cell.
    pub resolution: f64,
    /// Simulation step, seconds.
    pub dt: f64,
    pub sensor: SensorSpec,
    pub robot_speed: f64,
    pub intruder_speed: f64,
    pub robot_diameter: f64,
    pub thresh_local: u8,
    pub thresh_global: u8,
    /// Inflation of the prior map used as background, meters.
    pub global_inflation: f64,
    pub local_inflation: InflationProfile,
    /// Side of the local window in cells; derived from the sensor range when unset.
    pub local_window: Option<usize>,
    pub iou_threshold: f64,
    pub min_blob_cells: usize,
    pub capture_radius: f64,
    /// Robots roam between patrol goals; when off they hold position unless pursuing.
    pub patrol: bool,
    /// Send robots after fused detections.
    pub pursuit: bool,
    pub pursuit_timeout: f64,
    /// A pursued target is re-identified with a detection this close to it.
    pub reacquire_radius: f64,
    pub goal_tolerance: f64,
    pub goal_staleness: f64,
    pub patrol_clearance: f64,
    pub patrol_retries: usize,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            resolution: 0.05,
            dt: 0.05,
            sensor: SensorSpec::default(),
            robot_speed: 0.22,
            intruder_speed: 0.22,
            robot_diameter: 0.21,
            thresh_local: 70,
            thresh_global: 50,
            global_inflation: 0.15,
            local_inflation: InflationProfile::default(),
            local_window: None,
            iou_threshold: 0.3,
            min_blob_cells: 1,
            capture_radius: 0.5,
            patrol: true,
            pursuit: false,
            pursuit_timeout: 2.0,
            reacquire_radius: 1.0,
            goal_tolerance: 0.2,
            goal_staleness: 30.0,
            patrol_clearance: 0.4,
            patrol_retries: 1000,
            exec: Exec::default(),
        }
    }
}

impl SimConfig {
    pub fn fusion(&self) -> FusionConfig {
        FusionConfig {
            iou_threshold: self.iou_threshold,
            robot_diameter: self.robot_diameter,
        }
    }

    pub fn window_cells(&self) -> usize {
        self.local_window
            .unwrap_or_else(|| local_window_cells(self.sensor.max_range, self.resolution))
    }

    /// Distance from a laser return out to which the local map still marks
    /// cells occupied after thresholding.
    pub fn effective_local_inflation(&self) -> f64 {
        self.local_inflation
            .kernel(self.resolution)
            .iter()
            .filter(|k| k.2 >= self.thresh_local)
            .map(|&(dx, dy, _)| ((dx * dx + dy * dy) as f64).sqrt() * self.resolution)
            .fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(name, format!("{v} must be positive")))
            }
        };
        positive("resolution", self.resolution)?;
        positive("dt", self.dt)?;
        positive("robot_speed", self.robot_speed)?;
        positive("intruder_speed", self.intruder_speed)?;
        positive("sensor.max_range", self.sensor.max_range)?;
        positive("sensor.rate", self.sensor.rate)?;
        if self.sensor.beam_count == 0 {
            return Err(Error::invalid("sensor.beam_count", "must be positive"));
        }
        if !(self.sensor.noise_sigma >= 0.0) {
            return Err(Error::invalid("sensor.noise_sigma", "must be non-negative"));
        }
        if !(self.capture_radius >= 0.0) {
            return Err(Error::invalid("capture_radius", "must be non-negative"));
        }
        for (name, t) in [
            ("thresh_local", self.thresh_local),
            ("thresh_global", self.thresh_global),
        ] {
            if !(1..=100).contains(&t) {
                return Err(Error::invalid(name, format!("{t} is outside 1..=100")));
            }
        }
        self.fusion().validate()?;
        let local = self.effective_local_inflation();
        if !(self.global_inflation > local) {
            return Err(Error::invalid(
                "global_inflation",
                format!(
                    "{} m must exceed the local map's effective inflation of {local:.3} m",
                    self.global_inflation
                ),
            ));
        }
        Ok(())
    }
}

/// Prior map (walls only) and its inflated copy used as background.
pub fn build_global_maps(
    arena: &Arena,
    resolution: f64,
    global_inflation: f64,
    thresh_global: u8,
) -> Result<(BinaryGrid, BinaryGrid)> {
    let prior = threshold(&arena.rasterize(resolution)?, thresh_global)?;
    let inflated = inflate_with(&prior, global_inflation, Exec::default());
    Ok((prior, inflated))
}

/// Static grids derived from an arena, shareable across trials.
#[derive(Debug, Clone)]
pub struct MapBundle {
    pub prior: BinaryGrid,
    pub inflated: BinaryGrid,
    /// Occupied wherever a prior obstacle is within the patrol clearance.
    pub clearance: BinaryGrid,
}

impl MapBundle {
    pub fn build(arena: &Arena, cfg: &SimConfig) -> Result<Self> {
        let (prior, inflated) = build_global_maps(
            arena,
            cfg.resolution,
            cfg.global_inflation,
            cfg.thresh_global,
        )?;
        let clearance = inflate_with(&prior, cfg.patrol_clearance, cfg.exec);
        Ok(Self {
            prior,
            inflated,
            clearance,
        })
    }

    pub fn geometry(&self) -> &GridGeometry {
        self.prior.geometry()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Footprint {
    Disc { radius: f64 },
    Rect { width: f64, length: f64 },
}

impl Footprint {
    fn half_extents(&self) -> (f64, f64) {
        match *self {
            Footprint::Disc { radius } => (radius, radius),
            Footprint::Rect { width, length } => (width / 2.0, length / 2.0),
        }
    }

    /// Every cell the footprint overlaps, as a box in grid cells.
    pub fn truth_bbox(&self, center: WorldPoint, geom: &GridGeometry) -> BBox {
        let (hx, hy) = self.half_extents();
        let lo = geom.world_to_grid(WorldPoint::new(center.x - hx, center.y - hy));
        let hi = geom.world_to_grid(WorldPoint::new(center.x + hx, center.y + hy));
        BBox {
            x1: lo.x,
            y1: lo.y,
            x2: hi.x + 1,
            y2: hi.y + 1,
        }
    }

    fn stamp(&self, scene: &mut SceneGrid, center: WorldPoint, label: u16) {
        match *self {
            Footprint::Disc { radius } => scene.stamp_disc(center, radius, label),
            Footprint::Rect { width, length } => {
                if let Ok(r) = Rect::centered(center, width, length) {
                    scene.stamp_rect(&r, label);
                }
            }
        }
    }

    /// Largest distance from the center to the footprint boundary.
    pub fn bounding_radius(&self) -> f64 {
        let (hx, hy) = self.half_extents();
        hx.hypot(hy).max(hx.max(hy))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    Patrolling,
    Pursuing {
        target: WorldPoint,
        last_seen: f64,
        planned_for: Option<WorldPoint>,
    },
}

#[derive(Debug, Clone)]
pub struct RobotState {
    pub id: RobotId,
    pub pose: Pose,
    pub speed_limit: f64,
    pub sensor: SensorSpec,
    pub patrol_goal: Option<WorldPoint>,
    goal_since: f64,
    pub path: VecDeque<WorldPoint>,
    pub mode: Mode,
}

impl RobotState {
    pub fn is_pursuing(&self) -> bool {
        matches!(self.mode, Mode::Pursuing { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntruderBehavior {
    /// Roam between random goals for the whole run.
    Wander,
    /// Head for a fixed escape point; leaving through it ends the intruder's run.
    Escape,
}

#[derive(Debug, Clone)]
pub struct IntruderState {
    pub id: usize,
    pub pose: Pose,
    pub footprint: Footprint,
    pub mobile: bool,
    pub speed: f64,
    pub behavior: IntruderBehavior,
    pub goal: Option<WorldPoint>,
    pub path: VecDeque<WorldPoint>,
    pub caught: bool,
    pub escaped: bool,
}

impl IntruderState {
    pub fn is_active(&self) -> bool {
        !self.caught && !self.escaped
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntityRef {
    Robot(usize),
    Intruder(usize),
}

impl fmt::Display for EntityRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntityRef::Robot(i) => write!(f, "r{i}"),
            EntityRef::Intruder(i) => write!(f, "i{i}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Spawn,
    Goal,
    Caught,
    Escaped,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventKind::Spawn => "spawn",
            EventKind::Goal => "goal",
            EventKind::Caught => "caught",
            EventKind::Escaped => "escaped",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub t: f64,
    pub kind: EventKind,
    pub entity: EntityRef,
    pub at: WorldPoint,
}

/// Output of one sensor frame.
#[derive(Debug, Clone)]
pub struct Perception {
    pub frame: u64,
    pub scans: Vec<Scan>,
    pub local: Vec<LocalFrame>,
    /// Per-robot detections after ally removal.
    pub roster: RobotRoster,
    pub fused: Vec<Detection>,
}

/// Single-writer world state.
#[derive(Debug, Clone)]
pub struct WorldModel {
    pub arena: Arena,
    pub maps: Arc<MapBundle>,
    /// Inflated prior plus inflated stationary obstacles; robots plan here.
    pub nav: Arc<BinaryGrid>,
    /// Walls plus stationary obstacles; nothing may enter these cells.
    pub solid: Arc<BinaryGrid>,
    pub config: SimConfig,
    pub robots: Vec<RobotState>,
    pub intruders: Vec<IntruderState>,
    pub clock: f64,
    pub frames: u64,
    next_frame_at: f64,
    pub rng: ChaCha8Rng,
    pub events: Vec<Event>,
}

const ROBOT_LABEL_BASE: u16 = 2;

impl WorldModel {
    pub fn new(arena: Arena, maps: Arc<MapBundle>, config: SimConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let nav = Arc::new(maps.inflated.clone());
        let solid = Arc::new(maps.prior.clone());
        let period = 1.0 / config.sensor.rate;
        Ok(Self {
            arena,
            maps,
            nav,
            solid,
            config,
            robots: Vec::new(),
            intruders: Vec::new(),
            clock: 0.0,
            frames: 0,
            next_frame_at: period,
            rng: ChaCha8Rng::seed_from_u64(seed),
            events: Vec::new(),
        })
    }

    /// World for an arena with freshly built maps.
    pub fn from_arena(arena: Arena, config: SimConfig, seed: u64) -> Result<Self> {
        let maps = Arc::new(MapBundle::build(&arena, &config)?);
        Self::new(arena, maps, config, seed)
    }

    pub fn geometry(&self) -> &GridGeometry {
        self.maps.geometry()
    }

    fn log(&mut self, kind: EventKind, entity: EntityRef, at: WorldPoint) {
        self.events.push(Event {
            t: self.clock,
            kind,
            entity,
            at,
        });
    }

    pub fn add_robot(&mut self, pose: Pose) -> Result<RobotId> {
        let cell = self.geometry().world_to_grid(pose.position());
        if !self.geometry().contains(cell) || self.solid.is_occupied(cell) {
            return Err(Error::OffMap {
                x: pose.x,
                y: pose.y,
            });
        }
        let id = RobotId(self.robots.len());
        self.robots.push(RobotState {
            id,
            pose,
            speed_limit: self.config.robot_speed,
            sensor: self.config.sensor,
            patrol_goal: None,
            goal_since: self.clock,
            path: VecDeque::new(),
            mode: Mode::Patrolling,
        });
        self.log(EventKind::Spawn, EntityRef::Robot(id.0), pose.position());
        Ok(id)
    }

    pub fn add_intruder(
        &mut self,
        pose: Pose,
        footprint: Footprint,
        mobile: bool,
        behavior: IntruderBehavior,
        goal: Option<WorldPoint>,
    ) -> Result<usize> {
        let cell = self.geometry().world_to_grid(pose.position());
        if !self.geometry().contains(cell) || self.solid.is_occupied(cell) {
            return Err(Error::OffMap {
                x: pose.x,
                y: pose.y,
            });
        }
        let id = self.intruders.len();
        self.intruders.push(IntruderState {
            id,
            pose,
            footprint,
            mobile,
            speed: if mobile {
                self.config.intruder_speed
            } else {
                0.0
            },
            behavior,
            goal: if mobile { goal } else { None },
            path: VecDeque::new(),
            caught: false,
            escaped: false,
        });
        self.log(EventKind::Spawn, EntityRef::Intruder(id), pose.position());
        if !mobile {
            self.rebuild_obstacles();
        }
        Ok(id)
    }

    fn rebuild_obstacles(&mut self) {
        let geom = *self.geometry();
        let mut solid = self.maps.prior.clone();
        for i in self.intruders.iter().filter(|i| !i.mobile) {
            let mut scene = SceneGrid::from_static(&BinaryGrid::free(geom));
            i.footprint.stamp(&mut scene, i.pose.position(), 2);
            let b = i.footprint.truth_bbox(i.pose.position(), &geom);
            for y in b.y1..b.y2 {
                for x in b.x1..b.x2 {
                    let g = GridPoint::new(x, y);
                    if scene.label(g) == 2 {
                        solid.set(g, OCCUPIED);
                    }
                }
            }
        }
        let nav = inflate_with(&solid, self.config.global_inflation, self.config.exec);
        self.solid = Arc::new(solid);
        self.nav = Arc::new(nav);
    }

    /// Uniform point in `region` that is clear of walls by the patrol
    /// clearance, free for navigation, and at least `d` from each `(p, d)`.
    pub fn sample_free_point(
        &mut self,
        region: Rect,
        keep_away: &[(WorldPoint, f64)],
    ) -> Result<WorldPoint> {
        const ATTEMPTS: usize = 20_000;
        let geom = *self.geometry();
        for _ in 0..ATTEMPTS {
            let p = WorldPoint::new(
                self.rng.random_range(region.min.x..region.max.x),
                self.rng.random_range(region.min.y..region.max.y),
            );
            let c = geom.world_to_grid(p);
            if geom.contains(c)
                && !self.maps.clearance.is_occupied(c)
                && !self.nav.is_occupied(c)
                && keep_away.iter().all(|(q, d)| p.distance(*q) >= *d)
            {
                return Ok(p);
            }
        }
        Err(Error::SamplingExhausted { attempts: ATTEMPTS })
    }

    fn robot_label(i: usize) -> u16 {
        ROBOT_LABEL_BASE + i as u16
    }

    /// Occupancy of the current instant: walls, robots, active intruders.
    pub fn scene(&self) -> SceneGrid {
        let mut scene = SceneGrid::from_static(&self.maps.prior);
        let base = ROBOT_LABEL_BASE + self.robots.len() as u16;
        for (k, i) in self
            .intruders
            .iter()
            .enumerate()
            .filter(|(_, i)| i.is_active())
        {
            i.footprint
                .stamp(&mut scene, i.pose.position(), base + k as u16);
        }
        let radius = self.config.robot_diameter / 2.0;
        for (k, r) in self.robots.iter().enumerate() {
            scene.stamp_disc(r.pose.position(), radius, Self::robot_label(k));
        }
        scene
    }

    /// One sweep for every robot. Range noise, if configured, is drawn from
    /// the world generator in robot order.
    pub fn sense(&mut self, scene: &SceneGrid) -> Vec<Scan> {
        let mut scans = self.config.exec.map_range(self.robots.len(), |k| {
            let r = &self.robots[k];
            raycast(scene, &r.pose, &r.sensor, Self::robot_label(k))
        });
        let sigma = self.config.sensor.noise_sigma;
        if sigma > 0.0 {
            let normal = Normal::new(0.0, sigma).expect("sigma validated");
            for scan in &mut scans {
                for r in scan.ranges.iter_mut().filter(|r| **r < scan.max_range) {
                    *r = (*r + normal.sample(&mut self.rng)).clamp(0.0, scan.max_range - 1e-9);
                }
            }
        }
        scans
    }

    /// Sense, run every robot's local pipeline, remove allies, and fuse.
    pub fn perceive(&mut self) -> Result<Perception> {
        let scene = self.scene();
        let scans = self.sense(&scene);
        let frame = self.frames;
        let cfg = &self.config;
        let window = cfg.window_cells();
        let pipeline = LocalPipeline {
            min_blob_cells: cfg.min_blob_cells,
        };
        let global = &self.maps.inflated;
        let geom = *global.geometry();
        let local = cfg
            .exec
            .map_range(self.robots.len(), |k| {
                let r = &self.robots[k];
                let cost = scan_to_costmap(
                    &scans[k],
                    &r.pose,
                    (window, window),
                    &cfg.local_inflation,
                    &geom,
                );
                let a = threshold(&cost, cfg.thresh_local)?;
                pipeline.process(&a, global, r.pose.position(), r.id)
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;

        let roster = RobotRoster::new(
            self.robots
                .iter()
                .zip(&local)
                .map(|(r, f)| RobotRecord {
                    id: r.id,
                    pose: r.pose.position(),
                    detections: f
                        .boxes
                        .iter()
                        .map(|&bbox| Detection {
                            bbox,
                            source_robot: r.id,
                            frame,
                        })
                        .collect(),
                })
                .collect(),
        )?;
        let roster = remove_ally_detections(&roster, &cfg.fusion(), &geom)?;
        let fused = if roster.is_empty() {
            Vec::new()
        } else {
            merge_all_with(&roster, cfg.iou_threshold, cfg.exec)?
        };
        Ok(Perception {
            frame,
            scans,
            local,
            roster,
            fused,
        })
    }

    fn plan(&self, from: WorldPoint, to: WorldPoint) -> Option<VecDeque<WorldPoint>> {
        let geom = *self.geometry();
        let goal = nearest_free(&self.nav, geom.world_to_grid(to), 6)?;
        let cells = plan_path(&self.nav, geom.world_to_grid(from), goal).ok()?;
        let mut path: VecDeque<WorldPoint> = cells
            .iter()
            .skip(1)
            .map(|&c| geom.grid_to_world(c))
            .collect();
        if geom.world_to_grid(to) == goal {
            path.pop_back();
            path.push_back(to);
        }
        Some(path)
    }

    fn refresh_robot_goals(&mut self) -> Result<()> {
        let spacing = safe_distance(self.arena.enclosure_diagonal(), self.robots.len().max(1))?;
        for k in 0..self.robots.len() {
            let r = &self.robots[k];
            let pos = r.pose.position();
            match r.mode {
                Mode::Patrolling if !self.config.patrol => continue,
                Mode::Patrolling => {
                    let stale = match r.patrol_goal {
                        None => true,
                        Some(g) => {
                            pos.distance(g) <= self.config.goal_tolerance
                                || self.clock - r.goal_since > self.config.goal_staleness
                                || r.path.is_empty()
                        }
                    };
                    if !stale {
                        continue;
                    }
                    let others: Vec<WorldPoint> = self
                        .robots
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != k)
                        .filter_map(|(_, o)| o.patrol_goal)
                        .collect();
                    let maps = Arc::clone(&self.maps);
                    let nav = Arc::clone(&self.nav);
                    let area = PatrolArea {
                        region: self.arena.patrol_region,
                        clearance: &maps.clearance,
                        nav: &nav,
                        max_retries: self.config.patrol_retries,
                    };
                    let goal = gen_patrol_goal(pos, &others, spacing, &area, &mut self.rng)?;
                    if goal.relaxations > 0 {
                        log::debug!(
                            "robot {k}: patrol spacing relaxed {}x to {:.3} m",
                            goal.relaxations,
                            goal.spacing
                        );
                    }
                    let path = self.plan(pos, goal.point);
                    let clock = self.clock;
                    let r = &mut self.robots[k];
                    r.goal_since = clock;
                    match path {
                        Some(p) => {
                            r.patrol_goal = Some(goal.point);
                            r.path = p;
                            self.log(EventKind::Goal, EntityRef::Robot(k), goal.point);
                        }
                        None => {
                            r.patrol_goal = None;
                            r.path.clear();
                        }
                    }
                }
                Mode::Pursuing {
                    target,
                    last_seen,
                    planned_for,
                } => {
                    let replan = match planned_for {
                        None => true,
                        Some(p) => {
                            p.distance(target) > 0.25
                                || (r.path.is_empty() && pos.distance(target) > 0.1)
                        }
                    };
                    if replan {
                        let path = self
                            .plan(pos, target)
                            .unwrap_or_else(|| VecDeque::from([target]));
                        let r = &mut self.robots[k];
                        r.path = path;
                        r.mode = Mode::Pursuing {
                            target,
                            last_seen,
                            planned_for: Some(target),
                        };
                    }
                }
            }
        }
        Ok(())
    }

    fn refresh_intruder_goals(&mut self) -> Result<()> {
        for k in 0..self.intruders.len() {
            let i = &self.intruders[k];
            if !i.mobile || !i.is_active() {
                continue;
            }
            let pos = i.pose.position();
            match i.behavior {
                IntruderBehavior::Wander => {
                    let arrived = i.goal.is_none_or(|g| {
                        pos.distance(g) <= self.config.goal_tolerance || i.path.is_empty()
                    });
                    if !arrived {
                        continue;
                    }
                    let goal = self.sample_free_point(self.arena.patrol_region, &[])?;
                    let path = self.plan(pos, goal);
                    let i = &mut self.intruders[k];
                    if let Some(p) = path {
                        i.goal = Some(goal);
                        i.path = p;
                        self.log(EventKind::Goal, EntityRef::Intruder(k), goal);
                    } else {
                        i.goal = None;
                    }
                }
                IntruderBehavior::Escape => {
                    if let (Some(goal), true) = (i.goal, i.path.is_empty()) {
                        if pos.distance(goal) > self.config.goal_tolerance {
                            let path = self
                                .plan(pos, goal)
                                .unwrap_or_else(|| VecDeque::from([goal]));
                            self.intruders[k].path = path;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Advance the world by `dt` seconds. Returns true when a sensor frame
    /// is due at the new time.
    pub fn step(&mut self, dt: f64) -> Result<bool> {
        if !(dt > 0.0) {
            return Err(Error::invalid("dt", format!("{dt} must be positive")));
        }
        self.refresh_robot_goals()?;
        self.refresh_intruder_goals()?;

        let solid = Arc::clone(&self.solid);
        let geom = *self.geometry();
        for r in &mut self.robots {
            advance(&mut r.pose, &mut r.path, r.speed_limit * dt, &solid, &geom);
        }
        for i in self
            .intruders
            .iter_mut()
            .filter(|i| i.mobile && i.is_active())
        {
            advance(&mut i.pose, &mut i.path, i.speed * dt, &solid, &geom);
        }
        self.clock += dt;

        let tol = self.config.goal_tolerance;
        let mut escaped = Vec::new();
        for i in self.intruders.iter_mut() {
            if i.behavior == IntruderBehavior::Escape && i.is_active() {
                if let Some(g) = i.goal {
                    if i.pose.position().distance(g) <= tol {
                        i.escaped = true;
                        escaped.push((i.id, i.pose.position()));
                    }
                }
            }
        }
        for (id, at) in escaped {
            self.log(EventKind::Escaped, EntityRef::Intruder(id), at);
        }

        if self.clock + 1e-9 >= self.next_frame_at {
            self.next_frame_at += 1.0 / self.config.sensor.rate;
            self.frames += 1;
            return Ok(true);
        }
        Ok(false)
    }

    /// Assign fused detections to robots.
    ///
    /// Pursuing robots first re-acquire the nearest detection close to their
    /// target; robots whose target has not been seen for the timeout return
    /// to patrol; the remaining detections go to the nearest patrolling
    /// robots, globally nearest pair first.
    pub fn dispatch_pursuit(&mut self, fused: &[Detection]) {
        let geom = *self.geometry();
        let centroids: Vec<WorldPoint> = fused
            .iter()
            .map(|d| {
                let (cx, cy) = d.bbox.center();
                WorldPoint::new(
                    geom.origin.x + cx * geom.resolution,
                    geom.origin.y + cy * geom.resolution,
                )
            })
            .collect();
        let mut used = vec![false; centroids.len()];
        let clock = self.clock;

        for r in &mut self.robots {
            if let Mode::Pursuing {
                target,
                planned_for,
                ..
            } = r.mode
            {
                let best = centroids
                    .iter()
                    .enumerate()
                    .filter(|(k, c)| {
                        !used[*k] && c.distance(target) <= self.config.reacquire_radius
                    })
                    .min_by(|a, b| a.1.distance(target).total_cmp(&b.1.distance(target)));
                if let Some((k, &c)) = best {
                    used[k] = true;
                    r.mode = Mode::Pursuing {
                        target: c,
                        last_seen: clock,
                        planned_for,
                    };
                }
            }
        }

        for r in &mut self.robots {
            if let Mode::Pursuing { last_seen, .. } = r.mode {
                if clock - last_seen > self.config.pursuit_timeout {
                    r.mode = Mode::Patrolling;
                    r.patrol_goal = None;
                    r.path.clear();
                }
            }
        }

        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (k, c) in centroids.iter().enumerate().filter(|(k, _)| !used[*k]) {
            for (j, r) in self
                .robots
                .iter()
                .enumerate()
                .filter(|(_, r)| !r.is_pursuing())
            {
                pairs.push((r.pose.position().distance(*c), k, j));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut taken = vec![false; self.robots.len()];
        for (_, k, j) in pairs {
            if used[k] || taken[j] {
                continue;
            }
            used[k] = true;
            taken[j] = true;
            let r = &mut self.robots[j];
            r.mode = Mode::Pursuing {
                target: centroids[k],
                last_seen: clock,
                planned_for: None,
            };
            r.path.clear();
        }
    }

    /// Mark active intruders closer than `radius` to any robot as caught.
    /// Returns how many were caught now.
    pub fn check_captures(&mut self, radius: f64) -> usize {
        let mut caught = Vec::new();
        for i in self.intruders.iter_mut().filter(|i| i.is_active()) {
            let p = i.pose.position();
            if self
                .robots
                .iter()
                .any(|r| r.pose.position().distance(p) < radius)
            {
                i.caught = true;
                i.path.clear();
                caught.push((i.id, p));
            }
        }
        let n = caught.len();
        for (id, at) in caught {
            self.log(EventKind::Caught, EntityRef::Intruder(id), at);
        }
        n
    }

    /// Ground-truth boxes of active intruders, in intruder order.
    pub fn truth_boxes(&self) -> Vec<(usize, BBox)> {
        let geom = *self.geometry();
        self.intruders
            .iter()
            .filter(|i| i.is_active())
            .map(|i| (i.id, i.footprint.truth_bbox(i.pose.position(), &geom)))
            .collect()
    }
}

/// Closest free cell to `c` within `reach` cells (Chebyshev rings).
fn nearest_free(grid: &BinaryGrid, c: GridPoint, reach: i64) -> Option<GridPoint> {
    let geom = grid.geometry();
    for ring in 0..=reach {
        let mut best: Option<(i64, GridPoint)> = None;
        for dy in -ring..=ring {
            for dx in -ring..=ring {
                if dx.abs().max(dy.abs()) != ring {
                    continue;
                }
                let g = GridPoint::new(c.x + dx, c.y + dy);
                if geom.contains(g) && !grid.is_occupied(g) {
                    let d = dx * dx + dy * dy;
                    if best.is_none_or(|(bd, _)| d < bd) {
                        best = Some((d, g));
                    }
                }
            }
        }
        if let Some((_, g)) = best {
            return Some(g);
        }
    }
    None
}

/// Move along `path` by up to `budget` meters. A move into a solid cell is
/// refused and the path dropped so the owner replans.
fn advance(
    pose: &mut Pose,
    path: &mut VecDeque<WorldPoint>,
    mut budget: f64,
    solid: &BinaryGrid,
    geom: &GridGeometry,
) {
    let start = pose.position();
    let mut pos = start;
    while budget > 0.0 {
        let Some(&next) = path.front() else { break };
        let d = pos.distance(next);
        if d <= budget {
            pos = next;
            budget -= d;
            path.pop_front();
        } else {
            pos = WorldPoint::new(
                pos.x + (next.x - pos.x) * budget / d,
                pos.y + (next.y - pos.y) * budget / d,
            );
            budget = 0.0;
        }
    }
    if pos == start {
        return;
    }
    if solid.is_occupied(geom.world_to_grid(pos)) {
        path.clear();
        return;
    }
    pose.heading = (pos.y - start.y).atan2(pos.x - start.x);
    pose.x = pos.x;
    pose.y = pos.y;
}

/// Map 1 world with default settings and no entities.
pub fn make_map1() -> Result<WorldModel> {
    WorldModel::from_arena(Arena::map1(), SimConfig::default(), 0)
}

/// Map 2 world with default settings and no entities.
pub fn make_map2() -> Result<WorldModel> {
    WorldModel::from_arena(Arena::map2(), SimConfig::default(), 0)
}
