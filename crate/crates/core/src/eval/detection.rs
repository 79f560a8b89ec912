use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::metrics::{frame_score, FrameScore, TrialMetrics};
use crate::error::{Error, Result};
use crate::fusion::Detection;
use crate::gridmap::WorldPoint;
use crate::sim::{
    Arena, Event, Footprint, IntruderBehavior, MapBundle, Perception, Pose, SimConfig, WorldModel,
};

/// An intruder placed by hand rather than sampled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntruderSpec {
    pub pose: Pose,
    pub footprint: Footprint,
    pub mobile: bool,
}

/// Detection-test setup. Hand placements come first; the remaining robots
/// and the random intruders are sampled from the world generator.
#[derive(Debug, Clone)]
pub struct DetectionScenario {
    pub arena: Arena,
    pub sim: SimConfig,
    pub robots: usize,
    pub robot_poses: Vec<Pose>,
    pub mobile_intruders: usize,
    pub stationary_intruders: usize,
    pub fixed_intruders: Vec<IntruderSpec>,
    /// Radius of the mobile disc intruders, meters.
    pub intruder_radius: f64,
    /// Side range of the stationary box intruders, meters.
    pub box_side: (f64, f64),
    pub frames: u64,
    pub seed: u64,
}

impl Default for DetectionScenario {
    fn default() -> Self {
        Self {
            arena: Arena::map1(),
            sim: SimConfig::default(),
            robots: 1,
            robot_poses: Vec::new(),
            mobile_intruders: 5,
            stationary_intruders: 3,
            fixed_intruders: Vec::new(),
            intruder_radius: 0.1,
            box_side: (0.5, 1.0),
            frames: 1999,
            seed: 0,
        }
    }
}

impl DetectionScenario {
    pub fn validate(&self) -> Result<()> {
        if self.frames == 0 {
            return Err(Error::invalid("frames", "must be at least 1"));
        }
        if self.robot_poses.len() > self.robots {
            return Err(Error::invalid(
                "robots",
                format!(
                    "{} placements given for {} robots",
                    self.robot_poses.len(),
                    self.robots
                ),
            ));
        }
        if !(self.intruder_radius > 0.0) {
            return Err(Error::invalid("intruder_radius", "must be positive"));
        }
        let (lo, hi) = self.box_side;
        if !(lo > 0.0 && lo <= hi) {
            return Err(Error::invalid(
                "box_side",
                format!("({lo}, {hi}) is not a positive range"),
            ));
        }
        self.sim.validate()
    }

    /// Build and populate the world.
    pub fn build_world(&self) -> Result<WorldModel> {
        self.validate()?;
        let maps = Arc::new(MapBundle::build(&self.arena, &self.sim)?);
        let mut w = WorldModel::new(self.arena.clone(), maps, self.sim.clone(), self.seed)?;
        // (center, bounding radius) of everything placed so far
        let mut placed: Vec<(WorldPoint, f64)> = Vec::new();
        let keep = |placed: &[(WorldPoint, f64)], r: f64| -> Vec<(WorldPoint, f64)> {
            placed.iter().map(|&(p, d)| (p, d + r + 0.3)).collect()
        };

        for spec in &self.fixed_intruders {
            w.add_intruder(
                spec.pose,
                spec.footprint,
                spec.mobile,
                IntruderBehavior::Wander,
                None,
            )?;
            placed.push((spec.pose.position(), spec.footprint.bounding_radius()));
        }
        for _ in 0..self.stationary_intruders {
            let (lo, hi) = self.box_side;
            let width = w.rng.random_range(lo..=hi);
            let length = w.rng.random_range(lo..=hi);
            let fp = Footprint::Rect { width, length };
            let r = fp.bounding_radius();
            let region = self
                .arena
                .patrol_region
                .shrink(r + self.sim.patrol_clearance)?;
            let c = w.sample_free_point(region, &keep(&placed, r))?;
            w.add_intruder(
                Pose::new(c.x, c.y, 0.0),
                fp,
                false,
                IntruderBehavior::Wander,
                None,
            )?;
            placed.push((c, r));
        }
        let robot_r = self.sim.robot_diameter / 2.0;
        for pose in &self.robot_poses {
            w.add_robot(*pose)?;
            placed.push((pose.position(), robot_r));
        }
        for _ in self.robot_poses.len()..self.robots {
            let c = w.sample_free_point(self.arena.patrol_region, &keep(&placed, robot_r))?;
            let heading = w.rng.random_range(-PI..PI);
            w.add_robot(Pose::new(c.x, c.y, heading))?;
            placed.push((c, robot_r));
        }
        for _ in 0..self.mobile_intruders {
            let fp = Footprint::Disc {
                radius: self.intruder_radius,
            };
            let c = w.sample_free_point(
                self.arena.patrol_region,
                &keep(&placed, self.intruder_radius),
            )?;
            let heading = w.rng.random_range(-PI..PI);
            w.add_intruder(
                Pose::new(c.x, c.y, heading),
                fp,
                true,
                IntruderBehavior::Wander,
                None,
            )?;
            placed.push((c, self.intruder_radius));
        }
        Ok(w)
    }
}

/// Everything a detection run produced.
#[derive(Debug, Clone)]
pub struct DetectionRun {
    pub metrics: TrialMetrics,
    pub scores: Vec<FrameScore>,
    /// Fused detections of every frame, in frame order.
    pub fused: Vec<Detection>,
    pub events: Vec<Event>,
}

pub fn run_detection_trial(scenario: &DetectionScenario) -> Result<DetectionRun> {
    run_detection_trial_with(scenario, |_, _, _| Ok(()))
}

/// Like [`run_detection_trial`], calling `observe` after each scored frame.
pub fn run_detection_trial_with<F>(
    scenario: &DetectionScenario,
    mut observe: F,
) -> Result<DetectionRun>
where
    F: FnMut(&WorldModel, &Perception, &FrameScore) -> Result<()>,
{
    let mut w = scenario.build_world()?;
    let dt = w.config.dt;
    let range = w.config.sensor.max_range;
    let mut scores = Vec::with_capacity(scenario.frames as usize);
    let mut fused = Vec::new();
    while (scores.len() as u64) < scenario.frames {
        if w.step(dt)? {
            let p = w.perceive()?;
            let (truth, in_range): (Vec<_>, Vec<_>) = w
                .intruders
                .iter()
                .filter(|i| i.is_active())
                .map(|i| {
                    let c = i.pose.position();
                    let near = w
                        .robots
                        .iter()
                        .any(|r| r.pose.position().distance(c) <= range);
                    (i.footprint.truth_bbox(c, w.geometry()), near)
                })
                .unzip();
            let score = frame_score(p.frame, &p.fused, &truth, &in_range);
            observe(&w, &p, &score)?;
            if w.config.pursuit {
                w.dispatch_pursuit(&p.fused);
            }
            scores.push(score);
            fused.extend(p.fused);
        }
        if w.config.pursuit {
            w.check_captures(w.config.capture_radius);
        }
    }
    Ok(DetectionRun {
        metrics: TrialMetrics::from_scores(&scores),
        scores,
        fused,
        events: w.events,
    })
}
