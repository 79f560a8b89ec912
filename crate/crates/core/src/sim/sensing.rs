use serde::{Deserialize, Serialize};

use super::raycast::{Pose, Scan};
use crate::gridmap::{Costmap, GridGeometry, GridPoint, MAX_COST};
use crate::localview::crop_coords;

/// Cost decay around each laser return.
///
/// The return cell costs 100, cells within `inscribed_radius` cost 99, and
/// beyond that cost falls off as `98 * exp(-cost_scaling * (d - inscribed))`
/// out to `radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InflationProfile {
    pub radius: f64,
    pub inscribed_radius: f64,
    pub cost_scaling: f64,
}

impl Default for InflationProfile {
    fn default() -> Self {
        Self {
            radius: 0.15,
            inscribed_radius: 0.05,
            cost_scaling: 10.0,
        }
    }
}

impl InflationProfile {
    pub fn cost_at(&self, d: f64) -> u8 {
        if d <= 1e-12 {
            MAX_COST
        } else if d > self.radius + 1e-9 {
            0
        } else if d <= self.inscribed_radius + 1e-9 {
            MAX_COST - 1
        } else {
            (98.0 * (-self.cost_scaling * (d - self.inscribed_radius)).exp()).floor() as u8
        }
    }

    /// Offsets with their cost, for a grid of the given resolution.
    pub fn kernel(&self, resolution: f64) -> Vec<(i64, i64, u8)> {
        let reach = (self.radius / resolution + 1e-9).floor().max(0.0) as i64;
        let mut k = Vec::new();
        for dy in -reach..=reach {
            for dx in -reach..=reach {
                let d = ((dx * dx + dy * dy) as f64).sqrt() * resolution;
                let c = self.cost_at(d);
                if c > 0 {
                    k.push((dx, dy, c));
                }
            }
        }
        k
    }
}

/// Window size (cells per side) that holds every return of a sensor with
/// the given range.
pub fn local_window_cells(max_range: f64, resolution: f64) -> usize {
    2 * (max_range / resolution - 1e-9).ceil() as usize + 4
}

/// Build the robot-centered local costmap from one scan.
///
/// The window is `window.0 x window.1` cells, aligned with the cells of
/// `global` and centered on the robot's cell.
pub fn scan_to_costmap(
    scan: &Scan,
    pose: &Pose,
    window: (usize, usize),
    inflation: &InflationProfile,
    global: &GridGeometry,
) -> Costmap {
    let center = global.world_to_grid(pose.position());
    let (tl, _) = crop_coords(center, window.0 as i64, window.1 as i64);
    let geom = global.window(tl, window.0, window.1);
    let mut map = Costmap::zeros(geom);
    let kernel = inflation.kernel(global.resolution);
    // nudge past the cell boundary so the endpoint lands in the hit cell
    let nudge = global.resolution * 1e-3;

    for (k, &r) in scan.ranges.iter().enumerate() {
        if !(r < scan.max_range) {
            continue;
        }
        let a = scan.bearing(k);
        let end = crate::gridmap::WorldPoint::new(
            pose.x + (r + nudge) * a.cos(),
            pose.y + (r + nudge) * a.sin(),
        );
        let hit = geom.world_to_grid(end);
        for &(dx, dy, c) in &kernel {
            map.raise(hit + GridPoint::new(dx, dy), c);
        }
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridmap::{threshold, Georeferenced, WorldPoint, OCCUPIED};

    fn global() -> GridGeometry {
        GridGeometry::new(200, 200, 0.05, WorldPoint::new(-5.0, -5.0)).unwrap()
    }

    fn scan_with(hit: Option<(usize, f64)>) -> Scan {
        let mut ranges = vec![2.5; 360];
        if let Some((k, r)) = hit {
            ranges[k] = r;
        }
        Scan {
            angle_min: 0.0,
            angle_increment: std::f64::consts::TAU / 360.0,
            max_range: 2.5,
            ranges,
        }
    }

    #[test]
    fn no_returns_means_zero_costs() {
        let m = scan_to_costmap(
            &scan_with(None),
            &Pose::new(0.01, 0.01, 0.0),
            (104, 104),
            &InflationProfile::default(),
            &global(),
        );
        assert!(m.cells().iter().all(|&c| c == 0));
        assert_eq!((m.geometry().width, m.geometry().height), (104, 104));
    }

    #[test]
    fn single_return_is_lethal_with_decay() {
        let pose = Pose::new(0.01, 0.01, 0.0);
        let prof = InflationProfile::default();
        let m = scan_to_costmap(
            &scan_with(Some((0, 1.0))),
            &pose,
            (104, 104),
            &prof,
            &global(),
        );
        let g = *m.geometry();
        let hit = g.world_to_grid(WorldPoint::new(1.01 + 1e-4, 0.01));
        assert_eq!(m.get(hit), Some(100));
        for (dx, dy) in [(1, 0), (0, 1), (1, 1), (-2, 0), (2, 1)] {
            let c = m.get(hit + GridPoint::new(dx, dy)).unwrap();
            assert!(c > 0 && c < 100);
            let d = ((dx * dx + dy * dy) as f64).sqrt() * 0.05;
            assert_eq!(c, prof.cost_at(d));
        }
        assert_eq!(m.get(hit + GridPoint::new(4, 0)), Some(0));

        let b = threshold(&m, 70).unwrap();
        assert_eq!(b.get(hit), Some(OCCUPIED));
        // effective local dilation is the 3x3 neighborhood
        assert_eq!(b.occupied_count(), 9);
    }

    #[test]
    fn window_size_for_default_sensor() {
        assert_eq!(local_window_cells(2.5, 0.05), 104);
    }
}
