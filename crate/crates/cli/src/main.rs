//! `sentry`: build arenas, run detection trials and pursuit campaigns, and
//! render frame dumps.

mod chart;
mod commands;
mod config;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::Counts;

#[derive(Debug, Parser)]
#[command(
    name = "sentry",
    version,
    about = "Multi-robot intruder detection simulator"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every command.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Seed for every random choice; generated and recorded when omitted.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Flat TOML config file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Grid resolution in meters per cell.
    #[arg(long, global = true)]
    pub resolution: Option<f64>,
    /// Cost at or above which a local costmap cell is occupied (1-100).
    #[arg(long, global = true)]
    pub thresh_local: Option<u8>,
    /// Cost at or above which a prior map cell is occupied (1-100).
    #[arg(long, global = true)]
    pub thresh_global: Option<u8>,
    /// IoU at which two detections are merged.
    #[arg(long, global = true)]
    pub iou_threshold: Option<f64>,
    /// Robot-intruder distance that counts as a capture, meters.
    #[arg(long, global = true)]
    pub capture_radius: Option<f64>,
    /// Write every robot's A/B/C/D grids per frame under <out>/frames.
    #[arg(long, global = true)]
    pub dump_frames: bool,
    /// Worker threads; 1 runs everything sequentially.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the prior and inflated maps of an arena.
    Map(MapArgs),
    /// Run a detection trial and score it against ground truth.
    Detect(DetectArgs),
    /// Run a pursuit campaign over team sizes and intruder counts.
    Labyrinth(LabyrinthArgs),
    /// Turn a frame dump into PNG panels.
    Render(RenderArgs),
}

#[derive(Debug, Clone, Args)]
pub struct MapArgs {
    /// `map1`, `map2`, or a map YAML file.
    #[arg(long)]
    pub name: Option<String>,
    /// Door width of map2, meters.
    #[arg(long)]
    pub door_width: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct DetectArgs {
    /// `map1`, `map2`, or a map YAML file.
    #[arg(long)]
    pub map: Option<String>,
    /// Team size.
    #[arg(long)]
    pub robots: Option<Counts>,
    /// Total intruders, stationary ones included.
    #[arg(long)]
    pub intruders: Option<Counts>,
    /// Number of intruders that are stationary boxes.
    #[arg(long)]
    pub stationary: Option<usize>,
    /// Frames to observe.
    #[arg(long, conflicts_with = "duration")]
    pub frames: Option<u64>,
    /// Simulated seconds instead of a frame count.
    #[arg(long)]
    pub duration: Option<f64>,
    /// Range noise standard deviation, meters.
    #[arg(long)]
    pub noise_sigma: Option<f64>,
    /// Let robots chase detections during the run.
    #[arg(long)]
    pub pursuit: bool,
}

#[derive(Debug, Clone, Args)]
pub struct LabyrinthArgs {
    /// Team sizes, e.g. `1..5` or `1,3,5`.
    #[arg(long)]
    pub robots: Option<Counts>,
    /// Intruder counts, e.g. `1..5`.
    #[arg(long)]
    pub intruders: Option<Counts>,
    /// Trials per (intruders, robots) cell.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Simulated seconds per trial.
    #[arg(long)]
    pub time_cap: Option<f64>,
    /// Door width of map2, meters.
    #[arg(long)]
    pub door_width: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct RenderArgs {
    /// Dump directory; defaults to <out>/frames.
    #[arg(long)]
    pub dump: Option<PathBuf>,
    /// Only this frame.
    #[arg(long)]
    pub frame: Option<u64>,
}

/// Command failure, split by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or configuration: exit code 2.
    Usage(anyhow::Error),
    /// Anything that went wrong while running: exit code 1.
    Runtime(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Runtime(e.into())
    }
}

pub fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.common.verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let common = cli.common;
    let run = || match cli.command {
        Command::Map(a) => commands::cmd_map(&common, &a),
        Command::Detect(a) => commands::cmd_detect(&common, &a),
        Command::Labyrinth(a) => commands::cmd_labyrinth(&common, &a),
        Command::Render(a) => render::cmd_render(&common, &a),
    };
    let result = match commands::thread_pool(common.jobs) {
        Ok(Some(pool)) => pool.install(run),
        Ok(None) => run(),
        Err(e) => Err(e),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
