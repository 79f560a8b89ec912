use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use super::metrics::success_rate;
use crate::error::{Error, Result};
use crate::gridmap::WorldPoint;
use crate::sim::{
    Arena, Footprint, IntruderBehavior, MapBundle, Pose, Rect, SimConfig, WorldModel,
};

/// Pursuit campaign setup.
#[derive(Debug, Clone)]
pub struct LabyrinthScenario {
    pub arena: Arena,
    pub sim: SimConfig,
    pub robot_counts: Vec<usize>,
    pub intruder_counts: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Simulated seconds before a trial is cut off.
    pub time_cap: f64,
    /// Side of the square around the arena center where robots start, meters.
    pub spawn_block: f64,
    /// Minimum distance between an intruder's start and its escape point.
    pub escape_distance: f64,
    /// Minimum distance from an intruder's start to any robot.
    pub spawn_clearance: f64,
    pub intruder_radius: f64,
}

impl Default for LabyrinthScenario {
    fn default() -> Self {
        Self {
            arena: Arena::map2(),
            sim: SimConfig {
                pursuit: true,
                ..SimConfig::default()
            },
            robot_counts: (1..=5).collect(),
            intruder_counts: (1..=5).collect(),
            trials: 20,
            seed: 0,
            time_cap: 240.0,
            spawn_block: 2.0,
            escape_distance: 12.0,
            spawn_clearance: 3.0,
            intruder_radius: 0.1,
        }
    }
}

impl LabyrinthScenario {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials", "must be at least 1"));
        }
        if self.robot_counts.is_empty() || self.robot_counts.contains(&0) {
            return Err(Error::invalid(
                "robot_counts",
                "need one or more positive team sizes",
            ));
        }
        if self.intruder_counts.is_empty() || self.intruder_counts.contains(&0) {
            return Err(Error::invalid(
                "intruder_counts",
                "need one or more positive intruder counts",
            ));
        }
        if !(self.time_cap > 0.0) {
            return Err(Error::invalid("time_cap", "must be positive"));
        }
        self.sim.validate()
    }
}

/// Seed of one trial, derived from the campaign seed and the trial's key.
pub fn mix_seed(base: u64, n_intruders: usize, n_robots: usize, trial: usize) -> u64 {
    let mut z = base;
    for v in [n_intruders as u64, n_robots as u64, trial as u64] {
        z = splitmix(z ^ splitmix(v));
    }
    z
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub n_intruders: usize,
    pub n_robots: usize,
    pub trial: usize,
    pub seed: u64,
    pub caught: usize,
    pub total: usize,
    pub success_rate: f64,
    /// Simulated seconds until the trial ended.
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignCell {
    pub n_intruders: usize,
    pub n_robots: usize,
    pub trials: usize,
    pub success_rates: Vec<f64>,
    pub mean_success: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignResult {
    /// Ordered by intruder count, then team size, then trial.
    pub outcomes: Vec<TrialOutcome>,
    /// `cells[i][r]` for `intruder_counts[i]` and `robot_counts[r]`.
    pub cells: Vec<Vec<CampaignCell>>,
}

/// One pursuit trial: robots start at the center, intruders head for their
/// escape points; ends when no intruder is left or time runs out.
pub fn run_labyrinth_trial(
    scenario: &LabyrinthScenario,
    maps: Arc<MapBundle>,
    n_intruders: usize,
    n_robots: usize,
    seed: u64,
) -> Result<(f64, usize)> {
    let mut w = WorldModel::new(scenario.arena.clone(), maps, scenario.sim.clone(), seed)?;
    let center = scenario.arena.patrol_region.center();
    let block = Rect::centered(center, scenario.spawn_block, scenario.spawn_block)?;
    let mut robots: Vec<(WorldPoint, f64)> = Vec::new();
    for _ in 0..n_robots {
        let p = w.sample_free_point(block, &robots)?;
        let heading = w.rng.random_range(-PI..PI);
        w.add_robot(Pose::new(p.x, p.y, heading))?;
        robots.push((p, 0.4));
    }
    let away: Vec<(WorldPoint, f64)> = robots
        .iter()
        .map(|&(p, _)| (p, scenario.spawn_clearance))
        .collect();
    let mut spawned = away.clone();
    for _ in 0..n_intruders {
        let start = w.sample_free_point(scenario.arena.patrol_region, &spawned)?;
        let escape = w.sample_free_point(
            scenario.arena.patrol_region,
            &[(start, scenario.escape_distance)],
        )?;
        let fp = Footprint::Disc {
            radius: scenario.intruder_radius,
        };
        let heading = (escape.y - start.y).atan2(escape.x - start.x);
        w.add_intruder(
            Pose::new(start.x, start.y, heading),
            fp,
            true,
            IntruderBehavior::Escape,
            Some(escape),
        )?;
        spawned.push((start, 0.5));
    }

    let dt = w.config.dt;
    while w.clock < scenario.time_cap && w.intruders.iter().any(|i| i.is_active()) {
        if w.step(dt)? && w.config.pursuit {
            let p = w.perceive()?;
            w.dispatch_pursuit(&p.fused);
        }
        w.check_captures(w.config.capture_radius);
    }
    let caught = w.intruders.iter().filter(|i| i.caught).count();
    Ok((w.clock, caught))
}

/// Run every (intruder count, team size, trial) combination. Trials run
/// through the configured execution policy; results are ordered by key.
pub fn run_labyrinth_campaign(scenario: &LabyrinthScenario) -> Result<CampaignResult> {
    scenario.validate()?;
    let maps = Arc::new(MapBundle::build(&scenario.arena, &scenario.sim)?);
    let mut jobs = Vec::new();
    for &ni in &scenario.intruder_counts {
        for &nr in &scenario.robot_counts {
            for t in 0..scenario.trials {
                jobs.push((ni, nr, t));
            }
        }
    }
    let outcomes = scenario
        .sim
        .exec
        .map(&jobs, |&(ni, nr, t)| {
            let seed = mix_seed(scenario.seed, ni, nr, t);
            let (duration, caught) =
                run_labyrinth_trial(scenario, Arc::clone(&maps), ni, nr, seed)?;
            Ok(TrialOutcome {
                n_intruders: ni,
                n_robots: nr,
                trial: t,
                seed,
                caught,
                total: ni,
                success_rate: success_rate(caught, ni)?,
                duration,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let cells = scenario
        .intruder_counts
        .iter()
        .enumerate()
        .map(|(i, &ni)| {
            scenario
                .robot_counts
                .iter()
                .enumerate()
                .map(|(r, &nr)| {
                    let start = (i * scenario.robot_counts.len() + r) * scenario.trials;
                    let rates: Vec<f64> = outcomes[start..start + scenario.trials]
                        .iter()
                        .map(|o| o.success_rate)
                        .collect();
                    CampaignCell {
                        n_intruders: ni,
                        n_robots: nr,
                        trials: rates.len(),
                        mean_success: rates.iter().sum::<f64>() / rates.len() as f64,
                        success_rates: rates,
                    }
                })
                .collect()
        })
        .collect();
    Ok(CampaignResult { outcomes, cells })
}
