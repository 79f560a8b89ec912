use rand::Rng;

use super::arena::Rect;
use crate::error::{Error, Result};
use crate::gridmap::{BinaryGrid, Georeferenced, WorldPoint};

/// Minimum spacing between patrol goals: half the enclosure diagonal split
/// across the team.
pub fn safe_distance(diagonal: f64, robots: usize) -> Result<f64> {
    if robots == 0 {
        return Err(Error::invalid("robots", "team size must be at least 1"));
    }
    if !(diagonal > 0.0) {
        return Err(Error::invalid(
            "diagonal",
            format!("{diagonal} is not positive"),
        ));
    }
    Ok(diagonal / (2.0 * robots as f64))
}

/// Where and how patrol goals may be drawn.
#[derive(Debug, Clone, Copy)]
pub struct PatrolArea<'a> {
    pub region: Rect,
    /// Cells within the wall clearance of the prior map are occupied here.
    pub clearance: &'a BinaryGrid,
    /// Navigation grid; goals must land on a free cell.
    pub nav: &'a BinaryGrid,
    pub max_retries: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatrolGoal {
    pub point: WorldPoint,
    /// Spacing actually enforced (after any relaxation).
    pub spacing: f64,
    pub relaxations: u32,
}

const MAX_RELAXATIONS: u32 = 16;

/// Rejection-sample a goal that is at least `spacing` from the robot and
/// from every other robot's goal and clear of walls. After `max_retries`
/// misses the spacing is halved.
pub fn gen_patrol_goal<R: Rng + ?Sized>(
    robot: WorldPoint,
    other_goals: &[WorldPoint],
    spacing: f64,
    area: &PatrolArea<'_>,
    rng: &mut R,
) -> Result<PatrolGoal> {
    let mut z = spacing;
    let geom = area.clearance.geometry();
    let r = area.region;
    for relaxations in 0..=MAX_RELAXATIONS {
        for _ in 0..area.max_retries.max(1) {
            let p = WorldPoint::new(
                rng.random_range(r.min.x..r.max.x),
                rng.random_range(r.min.y..r.max.y),
            );
            let cell = geom.world_to_grid(p);
            let ok = geom.contains(cell)
                && !area.clearance.is_occupied(cell)
                && !area.nav.is_occupied(cell)
                && p.distance(robot) >= z
                && other_goals.iter().all(|g| p.distance(*g) >= z);
            if ok {
                return Ok(PatrolGoal {
                    point: p,
                    spacing: z,
                    relaxations,
                });
            }
        }
        log::debug!("patrol goal: no sample at spacing {z:.3} m, halving");
        z /= 2.0;
    }
    Err(Error::SamplingExhausted {
        attempts: area.max_retries.max(1) * (MAX_RELAXATIONS as usize + 1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn safe_distance_examples() {
        let p = 20f64.hypot(20.0);
        assert!((safe_distance(p, 4).unwrap() - 3.5355339059327378).abs() < 1e-12);
        assert_eq!(safe_distance(p, 1).unwrap(), p / 2.0);
        assert_eq!(
            safe_distance(p, 2).unwrap(),
            safe_distance(p, 1).unwrap() / 2.0
        );
        assert!((safe_distance(p, 5).unwrap() - 2.8284271247461903).abs() < 1e-12);
        assert!(safe_distance(p, 0).is_err());
    }
}
