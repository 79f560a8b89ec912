use sentry_core::eval::{run_detection_trial, DetectionScenario};
use sentry_core::fusion::{Detection, RobotId};
use sentry_core::gridmap::WorldPoint;
use sentry_core::localview::BBox;
use sentry_core::sim::{
    Arena, EventKind, Footprint, IntruderBehavior, Mode, Pose, SimConfig, WorldModel,
};

fn still_world() -> WorldModel {
    let cfg = SimConfig {
        patrol: false,
        ..SimConfig::default()
    };
    WorldModel::from_arena(Arena::map1(), cfg, 1).unwrap()
}

fn detection_at(w: &WorldModel, p: WorldPoint) -> Detection {
    let c = w.geometry().world_to_grid(p);
    Detection {
        bbox: BBox {
            x1: c.x - 2,
            y1: c.y - 2,
            x2: c.x + 3,
            y2: c.y + 3,
        },
        source_robot: RobotId(0),
        frame: 1,
    }
}

#[test]
fn robot_advances_speed_times_dt() {
    let mut w = still_world();
    w.add_robot(Pose::new(0.0, 0.0, 0.0)).unwrap();
    w.robots[0].path.push_back(WorldPoint::new(1.0, 0.0));
    w.step(0.05).unwrap();
    assert!((w.robots[0].pose.x - 0.011).abs() < 1e-12);
    assert_eq!(w.robots[0].pose.y, 0.0);
}

#[test]
fn frames_every_fourth_step() {
    let mut w = still_world();
    w.add_robot(Pose::new(0.0, 0.0, 0.0)).unwrap();
    let due: Vec<usize> = (1..=40).filter(|_| w.step(0.05).unwrap()).collect();
    assert_eq!(due, (1..=10).map(|k| 4 * k).collect::<Vec<_>>());
    assert!(w.step(0.0).is_err());
}

#[test]
fn entities_stay_out_of_walls_and_boxes_stay_put() {
    let sc = DetectionScenario {
        robots: 5,
        seed: 9,
        sim: SimConfig {
            pursuit: true,
            ..SimConfig::default()
        },
        ..DetectionScenario::default()
    };
    let mut w = sc.build_world().unwrap();
    let boxes: Vec<Pose> = w
        .intruders
        .iter()
        .filter(|i| !i.mobile)
        .map(|i| i.pose)
        .collect();
    assert_eq!(boxes.len(), 3);
    for _ in 0..3000 {
        if w.step(0.05).unwrap() {
            let p = w.perceive().unwrap();
            w.dispatch_pursuit(&p.fused);
        }
        let geom = *w.geometry();
        for r in &w.robots {
            assert!(!w.solid.is_occupied(geom.world_to_grid(r.pose.position())));
        }
        for i in w.intruders.iter().filter(|i| i.mobile) {
            assert!(!w.solid.is_occupied(geom.world_to_grid(i.pose.position())));
        }
        let now: Vec<Pose> = w
            .intruders
            .iter()
            .filter(|i| !i.mobile)
            .map(|i| i.pose)
            .collect();
        assert_eq!(now, boxes);
    }
}

#[test]
fn dispatch_examples() {
    let mut w = still_world();
    w.add_robot(Pose::new(-1.0, 0.0, 0.0)).unwrap();
    w.add_robot(Pose::new(1.5, 0.0, 0.0)).unwrap();
    w.dispatch_pursuit(&[]);
    assert!(w.robots.iter().all(|r| r.mode == Mode::Patrolling));

    let d = detection_at(&w, WorldPoint::new(0.5, 0.0));
    w.dispatch_pursuit(&[d]);
    assert!(w.robots[1].is_pursuing());
    assert!(!w.robots[0].is_pursuing());

    let mut w = still_world();
    w.add_robot(Pose::new(0.0, 0.0, 0.0)).unwrap();
    let far = detection_at(&w, WorldPoint::new(2.0, 2.0));
    let near = detection_at(&w, WorldPoint::new(-0.6, 0.2));
    w.dispatch_pursuit(&[far, near]);
    match w.robots[0].mode {
        Mode::Pursuing { target, .. } => assert!(target.distance(WorldPoint::new(-0.6, 0.2)) < 0.1),
        Mode::Patrolling => panic!("robot should pursue"),
    }
}

#[test]
fn pursuit_times_out() {
    let mut w = still_world();
    w.add_robot(Pose::new(0.0, 0.0, 0.0)).unwrap();
    let d = detection_at(&w, WorldPoint::new(1.0, 1.0));
    w.dispatch_pursuit(&[d]);
    assert!(w.robots[0].is_pursuing());
    for _ in 0..20 {
        w.step(0.05).unwrap();
    }
    w.dispatch_pursuit(&[]);
    assert!(
        w.robots[0].is_pursuing(),
        "1 s without sightings is within the timeout"
    );
    for _ in 0..30 {
        w.step(0.05).unwrap();
    }
    w.dispatch_pursuit(&[]);
    assert_eq!(w.robots[0].mode, Mode::Patrolling);
}

#[test]
fn capture_examples() {
    let mut w = still_world();
    w.add_robot(Pose::new(0.0, 0.0, 0.0)).unwrap();
    let disc = Footprint::Disc { radius: 0.1 };
    w.add_intruder(
        Pose::new(0.3, 0.0, 0.0),
        disc,
        true,
        IntruderBehavior::Wander,
        None,
    )
    .unwrap();
    w.add_intruder(
        Pose::new(2.0, 2.0, 0.0),
        disc,
        true,
        IntruderBehavior::Wander,
        None,
    )
    .unwrap();
    w.add_intruder(
        Pose::new(0.0, 0.2, 0.0),
        disc,
        true,
        IntruderBehavior::Wander,
        None,
    )
    .unwrap();
    w.intruders[2].escaped = true;
    assert_eq!(w.check_captures(0.5), 1);
    assert!(w.intruders[0].caught);
    assert!(!w.intruders[1].caught);
    assert!(!w.intruders[2].caught && w.intruders[2].escaped);
    assert_eq!(w.check_captures(0.5), 0);
    assert!(w.events.iter().any(|e| e.kind == EventKind::Caught));
}

#[test]
fn zero_radius_never_captures() {
    let mut w = still_world();
    w.add_robot(Pose::new(0.0, 0.0, 0.0)).unwrap();
    w.add_intruder(
        Pose::new(0.0, 0.0, 0.0),
        Footprint::Disc { radius: 0.1 },
        false,
        IntruderBehavior::Wander,
        None,
    )
    .unwrap();
    assert_eq!(w.check_captures(0.0), 0);
}

#[test]
fn same_seed_same_run() {
    let sc = DetectionScenario {
        robots: 3,
        frames: 150,
        seed: 21,
        ..DetectionScenario::default()
    };
    let a = run_detection_trial(&sc).unwrap();
    let b = run_detection_trial(&sc).unwrap();
    assert_eq!(a.scores, b.scores);
    assert_eq!(a.fused, b.fused);
    assert_eq!(a.events, b.events);
    let c = run_detection_trial(&DetectionScenario { seed: 22, ..sc }).unwrap();
    assert_ne!(a.events, c.events);
}
