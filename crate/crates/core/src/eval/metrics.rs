use serde::Serialize;

use crate::error::{Error, Result};
use crate::fusion::Detection;
use crate::localview::BBox;

/// Counts for one sensor frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct FrameScore {
    pub frame: u64,
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
}

/// Score fused detections against ground truth.
///
/// A detection is a true positive when it overlaps any truth box by at
/// least one cell. A miss is an intruder flagged in range that no detection
/// overlaps. `truth` and `in_range` are indexed by intruder.
pub fn frame_score(
    frame: u64,
    fused: &[Detection],
    truth: &[BBox],
    in_range: &[bool],
) -> FrameScore {
    debug_assert_eq!(truth.len(), in_range.len());
    let tp = fused
        .iter()
        .filter(|d| truth.iter().any(|t| d.bbox.intersects(t)))
        .count() as u64;
    let fn_ = truth
        .iter()
        .zip(in_range)
        .filter(|(t, &r)| r && !fused.iter().any(|d| d.bbox.intersects(t)))
        .count() as u64;
    FrameScore {
        frame,
        tp,
        fp: fused.len() as u64 - tp,
        fn_,
    }
}

/// `None` when nothing was reported.
pub fn precision(tp: u64, fp: u64) -> Option<f64> {
    (tp + fp > 0).then(|| tp as f64 / (tp + fp) as f64)
}

/// `None` when there was nothing to find.
pub fn recall(tp: u64, fn_: u64) -> Option<f64> {
    (tp + fn_ > 0).then(|| tp as f64 / (tp + fn_) as f64)
}

pub fn f1(precision: Option<f64>, recall: Option<f64>) -> Option<f64> {
    let (p, r) = (precision?, recall?);
    (p + r > 0.0).then(|| 2.0 * p * r / (p + r))
}

/// Percentage of intruders caught.
pub fn success_rate(caught: usize, total: usize) -> Result<f64> {
    if total == 0 {
        return Err(Error::invalid("total", "no intruders to catch"));
    }
    if caught > total {
        return Err(Error::invalid(
            "caught",
            format!("{caught} exceeds total {total}"),
        ));
    }
    Ok(100.0 * caught as f64 / total as f64)
}

/// Aggregate over a run.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct TrialMetrics {
    pub frames_observed: u64,
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

impl TrialMetrics {
    pub fn from_totals(frames_observed: u64, tp: u64, fp: u64, fn_: u64) -> Self {
        let p = precision(tp, fp);
        let r = recall(tp, fn_);
        Self {
            frames_observed,
            tp,
            fp,
            fn_,
            precision: p,
            recall: r,
            f1: f1(p, r),
        }
    }

    pub fn from_scores(scores: &[FrameScore]) -> Self {
        let mut m = Self::default();
        for s in scores {
            m.push(s);
        }
        m
    }

    /// Fold one more frame into the totals.
    pub fn push(&mut self, s: &FrameScore) {
        *self = Self::from_totals(
            self.frames_observed + 1,
            self.tp + s.tp,
            self.fp + s.fp,
            self.fn_ + s.fn_,
        );
    }
}
