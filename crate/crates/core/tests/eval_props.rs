use proptest::prelude::*;
use sentry_core::eval::{
    f1, frame_score, precision, recall, run_detection_trial, run_labyrinth_campaign,
    DetectionScenario, FrameScore, IntruderSpec, LabyrinthScenario, TrialMetrics,
};
use sentry_core::fusion::{Detection, RobotId};
use sentry_core::localview::BBox;
use sentry_core::sim::{Footprint, Pose, SimConfig};

fn bbox() -> impl Strategy<Value = BBox> {
    (0i64..40, 0i64..40, 1i64..8, 1i64..8).prop_map(|(x, y, w, h)| BBox {
        x1: x,
        y1: y,
        x2: x + w,
        y2: y + h,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn f1_equals_count_form(tp in 0u64..100_000, fp in 0u64..100_000, fn_ in 0u64..100_000) {
        let p = precision(tp, fp);
        let r = recall(tp, fn_);
        match f1(p, r) {
            Some(v) => {
                let direct = 2.0 * tp as f64 / (2 * tp + fp + fn_) as f64;
                prop_assert!((v - direct).abs() <= 1e-12, "{} vs {}", v, direct);
                prop_assert!((0.0..=1.0).contains(&v));
            }
            None => prop_assert!(p.is_none() || r.is_none() || tp == 0),
        }
    }

    #[test]
    fn frame_score_invariants(
        fused in proptest::collection::vec(bbox(), 0..10),
        truth in proptest::collection::vec((bbox(), any::<bool>()), 0..10),
    ) {
        let dets: Vec<Detection> = fused
            .iter()
            .map(|&b| Detection { bbox: b, source_robot: RobotId(0), frame: 0 })
            .collect();
        let (boxes, flags): (Vec<BBox>, Vec<bool>) = truth.into_iter().unzip();
        let s = frame_score(7, &dets, &boxes, &flags);
        prop_assert_eq!(s.tp + s.fp, dets.len() as u64);
        prop_assert!(s.fn_ <= flags.iter().filter(|f| **f).count() as u64);
        let tp = fused.iter().filter(|f| boxes.iter().any(|t| f.intersection_area(t) > 0)).count() as u64;
        prop_assert_eq!(s.tp, tp);
    }

    #[test]
    fn totals_are_sums(scores in proptest::collection::vec((0u64..50, 0u64..50, 0u64..50), 0..60)) {
        let scores: Vec<FrameScore> = scores
            .into_iter()
            .enumerate()
            .map(|(i, (tp, fp, fn_))| FrameScore { frame: i as u64, tp, fp, fn_ })
            .collect();
        let m = TrialMetrics::from_scores(&scores);
        prop_assert_eq!(m.frames_observed, scores.len() as u64);
        prop_assert_eq!(m.tp, scores.iter().map(|s| s.tp).sum::<u64>());
        prop_assert_eq!(m.fp, scores.iter().map(|s| s.fp).sum::<u64>());
        prop_assert_eq!(m.fn_, scores.iter().map(|s| s.fn_).sum::<u64>());
        prop_assert_eq!(m.precision, precision(m.tp, m.fp));
        prop_assert_eq!(m.recall, recall(m.tp, m.fn_));
    }
}

#[test]
fn table_one_rows() {
    for (tp, fp, fn_, p, r, f) in [
        (6967, 176, 1889, 0.975, 0.787, 0.871),
        (14953, 1047, 619, 0.935, 0.960, 0.947),
    ] {
        let m = TrialMetrics::from_totals(1999, tp, fp, fn_);
        assert!((m.precision.unwrap() - p).abs() <= 0.0005);
        assert!((m.recall.unwrap() - r).abs() <= 0.0005);
        assert!((m.f1.unwrap() - f).abs() <= 0.001);
    }
    assert!((f1(Some(0.975), Some(0.787)).unwrap() - 0.871).abs() <= 0.001);
    assert!((f1(Some(0.935), Some(0.960)).unwrap() - 0.947).abs() <= 0.001);
}

#[test]
fn empty_arena_has_nothing_to_score() {
    let sc = DetectionScenario {
        robots: 1,
        mobile_intruders: 0,
        stationary_intruders: 0,
        frames: 300,
        seed: 4,
        ..DetectionScenario::default()
    };
    let m = run_detection_trial(&sc).unwrap().metrics;
    assert_eq!((m.tp, m.fp, m.fn_), (0, 0, 0));
    assert_eq!(m.frames_observed, 300);
    assert_eq!(m.precision, None);
}

#[test]
fn parked_box_in_front_of_parked_robot_is_always_found() {
    let sc = DetectionScenario {
        sim: SimConfig {
            patrol: false,
            ..SimConfig::default()
        },
        robots: 1,
        robot_poses: vec![Pose::new(-0.5, 0.0, 0.0)],
        mobile_intruders: 0,
        stationary_intruders: 0,
        fixed_intruders: vec![IntruderSpec {
            pose: Pose::new(0.5, 0.0, 0.0),
            footprint: Footprint::Rect {
                width: 0.3,
                length: 0.3,
            },
            mobile: false,
        }],
        frames: 100,
        seed: 2,
        ..DetectionScenario::default()
    };
    let m = run_detection_trial(&sc).unwrap().metrics;
    assert_eq!(m.recall, Some(1.0));
    assert_eq!(m.precision, Some(1.0));
    assert_eq!(m.fn_, 0);
}

#[test]
fn zero_frames_rejected() {
    let sc = DetectionScenario {
        frames: 0,
        ..DetectionScenario::default()
    };
    assert!(run_detection_trial(&sc).is_err());
}

fn small_campaign() -> LabyrinthScenario {
    LabyrinthScenario {
        robot_counts: vec![1, 2],
        intruder_counts: vec![1, 2],
        trials: 2,
        time_cap: 40.0,
        seed: 8,
        ..LabyrinthScenario::default()
    }
}

#[test]
fn no_capture_radius_no_success() {
    let mut sc = small_campaign();
    sc.sim.capture_radius = 0.0;
    let r = run_labyrinth_campaign(&sc).unwrap();
    assert_eq!(r.cells.len(), 2);
    assert!(r.cells.iter().flatten().all(|c| c.mean_success == 0.0));
}

#[test]
fn out_of_reach_intruders_escape() {
    // starts at least 3 m from every robot; in 5 s both sides cover at most
    // 1.1 m each, so the gap never drops below the 0.5 m capture radius
    let sc = LabyrinthScenario {
        robot_counts: vec![1, 3],
        intruder_counts: vec![1],
        trials: 3,
        time_cap: 5.0,
        spawn_clearance: 3.0,
        ..LabyrinthScenario::default()
    };
    let r = run_labyrinth_campaign(&sc).unwrap();
    assert!(r.outcomes.iter().all(|o| o.caught == 0));
}

#[test]
fn campaign_is_deterministic_and_means_match() {
    let sc = small_campaign();
    let a = run_labyrinth_campaign(&sc).unwrap();
    let mut seq = sc.clone();
    seq.sim.exec = sentry_core::Exec::Sequential;
    let b = run_labyrinth_campaign(&seq).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.outcomes.len(), 8);
    for c in a.cells.iter().flatten() {
        let mean = c.success_rates.iter().sum::<f64>() / c.trials as f64;
        assert_eq!(c.mean_success, mean);
        assert!(c.success_rates.iter().all(|r| (0.0..=100.0).contains(r)));
    }
}
