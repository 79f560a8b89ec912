//! Central fusion of per-robot detections.
//!
//! Each frame the fusion step receives every robot's detection list, strips
//! detections that are really teammates (ally removal), then merges the
//! lists pairwise in a balanced divide-and-conquer tree, collapsing boxes
//! whose IoU reaches the threshold into the larger of the two.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::gridmap::{GridGeometry, WorldPoint};
use crate::localview::BBox;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RobotId(pub usize);

impl std::fmt::Display for RobotId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Detection {
    pub bbox: BBox,
    pub source_robot: RobotId,
    pub frame: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobotRecord {
    pub id: RobotId,
    pub pose: WorldPoint,
    pub detections: Vec<Detection>,
}

/// Robots in a fixed order; the merge tree indexes them by position.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RobotRoster {
    pub robots: Vec<RobotRecord>,
}

impl RobotRoster {
    pub fn new(robots: Vec<RobotRecord>) -> Result<Self> {
        let mut ids: Vec<_> = robots.iter().map(|r| r.id).collect();
        ids.sort();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("roster", "duplicate robot id"));
        }
        Ok(Self { robots })
    }

    pub fn len(&self) -> usize {
        self.robots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.robots.is_empty()
    }

    pub fn detection_count(&self) -> usize {
        self.robots.iter().map(|r| r.detections.len()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FusionConfig {
    /// IoU at or above which two boxes are the same object.
    pub iou_threshold: f64,
    /// Diameter of a robot's footprint circle, meters.
    pub robot_diameter: f64,
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self {
            iou_threshold: 0.3,
            robot_diameter: 0.21,
        }
    }
}

impl FusionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.iou_threshold > 0.0 && self.iou_threshold <= 1.0) {
            return Err(Error::invalid(
                "iou_threshold",
                format!("{} is outside (0, 1]", self.iou_threshold),
            ));
        }
        if !(self.robot_diameter > 0.0 && self.robot_diameter.is_finite()) {
            return Err(Error::invalid(
                "robot_diameter",
                format!("{} is not positive", self.robot_diameter),
            ));
        }
        Ok(())
    }
}

/// Intersection over union of two cell boxes.
pub fn iou(b1: &BBox, b2: &BBox) -> f64 {
    let inter = b1.intersection_area(b2);
    if inter == 0 {
        return 0.0;
    }
    let union = b1.area() + b2.area() - inter;
    inter as f64 / union as f64
}

/// Square box covering a robot of diameter `diameter` at `pose`.
pub fn ally_bbox(pose: WorldPoint, diameter: f64, geometry: &GridGeometry) -> Result<BBox> {
    if !(diameter > 0.0) {
        return Err(Error::invalid(
            "diameter",
            format!("{diameter} is not positive"),
        ));
    }
    let cell = geometry.world_to_grid(pose);
    if !geometry.contains(cell) {
        return Err(Error::OffMap {
            x: pose.x,
            y: pose.y,
        });
    }
    let side = ((diameter / geometry.resolution) - 1e-9).ceil().max(1.0) as i64;
    let x1 = cell.x - side / 2;
    let y1 = cell.y - side / 2;
    Ok(BBox {
        x1,
        y1,
        x2: x1 + side,
        y2: y1 + side,
    })
}

/// Remove detections of teammates.
///
/// For every robot `i` and every other robot `j`, the first detection of
/// `j` whose IoU with `i`'s footprint box reaches the threshold is dropped.
/// At most one detection per `(i, j)` pair is removed.
pub fn remove_ally_detections(
    roster: &RobotRoster,
    cfg: &FusionConfig,
    geometry: &GridGeometry,
) -> Result<RobotRoster> {
    cfg.validate()?;
    let mut out = roster.clone();
    for i in 0..out.robots.len() {
        let ally = ally_bbox(out.robots[i].pose, cfg.robot_diameter, geometry)?;
        for j in 0..out.robots.len() {
            if i == j {
                continue;
            }
            let dets = &mut out.robots[j].detections;
            if let Some(k) = dets
                .iter()
                .position(|d| iou(&ally, &d.bbox) >= cfg.iou_threshold)
            {
                dets.remove(k);
            }
        }
    }
    Ok(out)
}

/// Union of two detection lists under IoU equivalence.
///
/// Starts from `s2`; each element of `s1` either replaces the first element
/// of `s2` it matches (only if strictly larger) or is appended.
pub fn fuse_detections(s1: &[Detection], s2: &[Detection], t: f64) -> Vec<Detection> {
    let mut out = s2.to_vec();
    for i in s1 {
        match s2.iter().position(|j| iou(&i.bbox, &j.bbox) >= t) {
            Some(idx) => {
                if i.bbox.area() > s2[idx].bbox.area() {
                    out[idx] = *i;
                }
            }
            None => out.push(*i),
        }
    }
    out
}

/// Reduce `leaves[l..=r]` with the balanced split at `floor((l + r) / 2)`;
/// `combine` receives the left half's result first.
pub fn reduce_tree<T, F>(leaves: &[T], combine: &F, exec: Exec) -> Option<T>
where
    T: Clone + Send + Sync,
    F: Fn(T, T) -> T + Sync,
{
    fn go<T, F>(leaves: &[T], l: usize, r: usize, combine: &F, exec: Exec) -> T
    where
        T: Clone + Send + Sync,
        F: Fn(T, T) -> T + Sync,
    {
        if l == r {
            return leaves[l].clone();
        }
        let q = (l + r) / 2;
        let (left, right) = exec.join(
            || go(leaves, l, q, combine, exec),
            || go(leaves, q + 1, r, combine, exec),
        );
        combine(left, right)
    }
    if leaves.is_empty() {
        return None;
    }
    Some(go(leaves, 0, leaves.len() - 1, combine, exec))
}

/// Merge every robot's detections into one list.
pub fn merge_all(roster: &RobotRoster, t: f64) -> Result<Vec<Detection>> {
    merge_all_with(roster, t, Exec::Sequential)
}

pub fn merge_all_with(roster: &RobotRoster, t: f64, exec: Exec) -> Result<Vec<Detection>> {
    let lists: Vec<Vec<Detection>> = roster.robots.iter().map(|r| r.detections.clone()).collect();
    // the right subtree's list is fused into the left one
    reduce_tree(&lists, &|l1, l2| fuse_detections(&l2, &l1, t), exec).ok_or(Error::EmptyRoster)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bb(x1: i64, y1: i64, x2: i64, y2: i64) -> BBox {
        BBox::new(x1, y1, x2, y2).unwrap()
    }

    fn det(b: BBox, robot: usize) -> Detection {
        Detection {
            bbox: b,
            source_robot: RobotId(robot),
            frame: 0,
        }
    }

    fn geom() -> GridGeometry {
        GridGeometry::new(100, 100, 0.05, WorldPoint::new(0.0, 0.0)).unwrap()
    }

    #[test]
    fn iou_examples() {
        let a = bb(0, 0, 10, 10);
        assert_eq!(iou(&a, &a), 1.0);
        assert_eq!(iou(&a, &bb(20, 20, 25, 25)), 0.0);
        assert_eq!(iou(&a, &bb(10, 0, 12, 10)), 0.0);
        assert!((iou(&a, &bb(5, 0, 15, 10)) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn ally_box_sizes() {
        let g = geom();
        let p = WorldPoint::new(1.025, 2.025); // cell (20, 40)
        assert_eq!(ally_bbox(p, 0.05, &g).unwrap(), bb(20, 40, 21, 41));
        let b = ally_bbox(p, 0.2, &g).unwrap();
        assert_eq!((b.width(), b.height()), (4, 4));
        assert!(b.contains(crate::gridmap::GridPoint::new(20, 40)));
        assert_eq!(b, ally_bbox(p, 0.2, &g).unwrap());
        assert!(ally_bbox(WorldPoint::new(-1.0, 0.0), 0.2, &g).is_err());
    }

    #[test]
    fn ally_covering_detection_is_removed() {
        let g = geom();
        let p0 = WorldPoint::new(1.025, 1.025);
        let p1 = WorldPoint::new(2.025, 1.025);
        let cfg = FusionConfig {
            iou_threshold: 0.5,
            robot_diameter: 0.2,
        };
        let ally0 = ally_bbox(p0, 0.2, &g).unwrap();
        let roster = RobotRoster::new(vec![
            RobotRecord {
                id: RobotId(0),
                pose: p0,
                detections: vec![],
            },
            RobotRecord {
                id: RobotId(1),
                pose: p1,
                detections: vec![det(ally0, 1)],
            },
        ])
        .unwrap();
        let out = remove_ally_detections(&roster, &cfg, &g).unwrap();
        assert!(out.robots[1].detections.is_empty());
    }

    #[test]
    fn only_first_match_per_pair_removed() {
        let g = geom();
        let p0 = WorldPoint::new(1.025, 1.025);
        let ally0 = ally_bbox(p0, 0.2, &g).unwrap();
        let roster = RobotRoster::new(vec![
            RobotRecord {
                id: RobotId(0),
                pose: p0,
                detections: vec![],
            },
            RobotRecord {
                id: RobotId(1),
                pose: WorldPoint::new(4.0, 4.0),
                detections: vec![det(bb(0, 0, 2, 2), 1), det(ally0, 1), det(ally0, 1)],
            },
        ])
        .unwrap();
        let out = remove_ally_detections(&roster, &FusionConfig::default(), &g).unwrap();
        assert_eq!(
            out.robots[1].detections,
            vec![det(bb(0, 0, 2, 2), 1), det(ally0, 1)]
        );
    }

    #[test]
    fn fuse_examples() {
        let a = det(bb(0, 0, 4, 4), 0);
        let b = det(bb(10, 10, 12, 12), 1);
        let big = det(bb(0, 0, 5, 5), 2);
        assert_eq!(fuse_detections(&[a], &[b], 0.3), vec![b, a]);
        assert_eq!(fuse_detections(&[big], &[a, b], 0.3), vec![big, b]);
        assert_eq!(fuse_detections(&[a], &[big], 0.3), vec![big]);
        let same = [a, b];
        assert_eq!(fuse_detections(&same, &same, 0.5), same.to_vec());
        assert_eq!(fuse_detections(&same, &[], 0.5), same.to_vec());
        assert_eq!(fuse_detections(&[], &same, 0.5), same.to_vec());
    }

    #[test]
    fn combine_tree_shape_for_five() {
        let leaves: Vec<String> = (1..=5).map(|i| format!("d{i}")).collect();
        let shape = reduce_tree(&leaves, &|l, r| format!("({l},{r})"), Exec::Sequential).unwrap();
        assert_eq!(shape, "(((d1,d2),d3),(d4,d5))");
        let one = reduce_tree(&leaves[..1], &|l, r| format!("({l},{r})"), Exec::Sequential);
        assert_eq!(one.as_deref(), Some("d1"));
    }

    #[test]
    fn merge_all_single_and_empty() {
        let d = vec![det(bb(0, 0, 3, 3), 0), det(bb(9, 9, 10, 10), 0)];
        let roster = RobotRoster::new(vec![RobotRecord {
            id: RobotId(0),
            pose: WorldPoint::new(1.0, 1.0),
            detections: d.clone(),
        }])
        .unwrap();
        assert_eq!(merge_all(&roster, 0.3).unwrap(), d);
        assert!(matches!(
            merge_all(&RobotRoster::default(), 0.3),
            Err(Error::EmptyRoster)
        ));
    }

    #[test]
    fn merge_three_views_of_one_object() {
        let boxes = [bb(10, 10, 14, 14), bb(10, 10, 15, 14), bb(11, 10, 14, 14)];
        let robots = boxes
            .iter()
            .enumerate()
            .map(|(i, b)| RobotRecord {
                id: RobotId(i),
                pose: WorldPoint::new(i as f64, 0.0),
                detections: vec![det(*b, i)],
            })
            .collect();
        let roster = RobotRoster::new(robots).unwrap();
        let out = merge_all(&roster, 0.3).unwrap();
        assert_eq!(out, vec![det(boxes[1], 1)]);
        assert_eq!(out, merge_all_with(&roster, 0.3, Exec::Parallel).unwrap());
    }

    #[test]
    fn duplicate_ids_rejected() {
        let r = RobotRecord {
            id: RobotId(1),
            pose: WorldPoint::default(),
            detections: vec![],
        };
        assert!(RobotRoster::new(vec![r.clone(), r]).is_err());
    }
}
