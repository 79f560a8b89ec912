//! Scoring and experiment drivers.
//!
//! [`run_detection_trial`] reproduces the single-arena detection protocol
//! (per-frame true/false positives and misses against ground truth), and
//! [`run_labyrinth_campaign`] runs seeded pursuit trials over a grid of team
//! and intruder counts. CSV writers live in [`report`].

mod detection;
mod labyrinth;
mod metrics;
pub mod report;

pub use detection::{
    run_detection_trial, run_detection_trial_with, DetectionRun, DetectionScenario, IntruderSpec,
};
pub use labyrinth::{
    mix_seed, run_labyrinth_campaign, run_labyrinth_trial, CampaignCell, CampaignResult,
    LabyrinthScenario, TrialOutcome,
};
pub use metrics::{f1, frame_score, precision, recall, success_rate, FrameScore, TrialMetrics};
