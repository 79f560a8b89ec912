use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{anyhow, Context};
use sentry_core::eval::{self, report, DetectionScenario, LabyrinthScenario};
use sentry_core::gridmap::{load_map, save_map, Georeferenced};
use sentry_core::sim::{Arena, MapBundle, Pose, SimConfig};
use sentry_core::Exec;

use crate::config::{Counts, RunConfig};
use crate::{chart, usage, Common, DetectArgs, Failure, LabyrinthArgs, MapArgs};

#[cfg(feature = "parallel")]
pub type Pool = rayon::ThreadPool;

/// Stand-in so callers look the same with and without the `parallel` feature.
#[cfg(not(feature = "parallel"))]
pub struct Pool;

#[cfg(not(feature = "parallel"))]
impl Pool {
    pub fn install<R>(&self, f: impl FnOnce() -> R) -> R {
        f()
    }
}

/// Dedicated pool for `--jobs N` with N > 1.
pub fn thread_pool(jobs: Option<usize>) -> Result<Option<Pool>, Failure> {
    match jobs {
        Some(0) => Err(usage(anyhow!("--jobs must be at least 1"))),
        None | Some(1) => Ok(None),
        #[cfg(feature = "parallel")]
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(Some)
            .map_err(|e| Failure::Runtime(e.into())),
        #[cfg(not(feature = "parallel"))]
        Some(n) => {
            log::warn!("built without the parallel feature; ignoring --jobs {n}");
            Ok(None)
        }
    }
}

fn exec(common: &Common) -> Exec {
    if common.jobs == Some(1) {
        Exec::Sequential
    } else {
        Exec::default()
    }
}

/// Config file, then flags, then a generated seed if none was given.
fn resolve(common: &Common, flags: RunConfig) -> Result<RunConfig, Failure> {
    let base = match &common.config {
        Some(p) => RunConfig::load(p).map_err(usage)?,
        None => RunConfig::default(),
    };
    let shared = RunConfig {
        seed: common.seed,
        resolution: common.resolution,
        thresh_local: common.thresh_local,
        thresh_global: common.thresh_global,
        iou_threshold: common.iou_threshold,
        capture_radius: common.capture_radius,
        ..RunConfig::default()
    };
    let mut cfg = base.overlay(flags).overlay(shared);
    if cfg.seed.is_none() {
        let seed = rand::random::<u64>();
        println!("seed = {seed}");
        cfg.seed = Some(seed);
    }
    Ok(cfg)
}

fn sim_config(cfg: &RunConfig, common: &Common) -> SimConfig {
    let mut s = SimConfig {
        exec: exec(common),
        ..SimConfig::default()
    };
    if let Some(v) = cfg.resolution {
        s.resolution = v;
    }
    if let Some(v) = cfg.thresh_local {
        s.thresh_local = v;
    }
    if let Some(v) = cfg.thresh_global {
        s.thresh_global = v;
    }
    if let Some(v) = cfg.iou_threshold {
        s.iou_threshold = v;
    }
    if let Some(v) = cfg.capture_radius {
        s.capture_radius = v;
    }
    if let Some(v) = cfg.robot_speed {
        s.robot_speed = v;
    }
    if let Some(v) = cfg.intruder_speed {
        s.intruder_speed = v;
    }
    if let Some(v) = cfg.noise_sigma {
        s.sensor.noise_sigma = v;
    }
    if let Some(v) = cfg.pursuit {
        s.pursuit = v;
    }
    s
}

/// Record the effective simulation settings back into the config.
fn record_sim(cfg: &mut RunConfig, s: &SimConfig) {
    cfg.resolution = Some(s.resolution);
    cfg.thresh_local = Some(s.thresh_local);
    cfg.thresh_global = Some(s.thresh_global);
    cfg.iou_threshold = Some(s.iou_threshold);
    cfg.capture_radius = Some(s.capture_radius);
    cfg.robot_speed = Some(s.robot_speed);
    cfg.intruder_speed = Some(s.intruder_speed);
    cfg.noise_sigma = Some(s.sensor.noise_sigma);
    cfg.pursuit = Some(s.pursuit);
}

/// Arena for a selector; a map file also fixes the resolution.
fn arena(name: &str, door_width: Option<f64>, sim: &mut SimConfig) -> Result<Arena, Failure> {
    match name {
        "map1" => Ok(Arena::map1()),
        "map2" => Arena::map2_with_door(door_width.unwrap_or(1.0)).map_err(usage),
        path if path.ends_with(".yaml") || path.ends_with(".yml") => {
            let grid = load_map(Path::new(path))?;
            sim.resolution = grid.geometry().resolution;
            let stem = Path::new(path)
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "custom".into());
            Ok(Arena::from_grid(stem, grid))
        }
        other => Err(usage(anyhow!(
            "unknown map `{other}`; expected map1, map2 or a .yaml map file"
        ))),
    }
}

pub fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn out_dir(common: &Common) -> anyhow::Result<&Path> {
    fs::create_dir_all(&common.out)
        .with_context(|| format!("creating output directory {}", common.out.display()))?;
    Ok(&common.out)
}

fn write_config(dir: &Path, cfg: &RunConfig) -> anyhow::Result<()> {
    let path = dir.join("config.toml");
    fs::write(&path, cfg.to_toml()?).with_context(|| format!("writing {}", path.display()))
}

pub fn cmd_map(common: &Common, args: &MapArgs) -> Result<(), Failure> {
    let mut cfg = resolve(
        common,
        RunConfig {
            map: args.name.clone(),
            door_width: args.door_width,
            ..RunConfig::default()
        },
    )?;
    let name = cfg.map.clone().unwrap_or_else(|| "map1".into());
    let mut sim = sim_config(&cfg, common);
    let arena = arena(&name, cfg.door_width, &mut sim)?;
    sim.validate().map_err(usage)?;
    let maps = MapBundle::build(&arena, &sim)?;

    let dir = out_dir(common)?;
    let prior = dir.join(format!("{}.yaml", arena.name));
    let inflated = dir.join(format!("{}_inflated.yaml", arena.name));
    save_map(&maps.prior, &prior)?;
    save_map(&maps.inflated, &inflated)?;
    cfg.map = Some(name);
    record_sim(&mut cfg, &sim);
    write_config(dir, &cfg)?;
    let g = maps.geometry();
    println!(
        "{}: {} x {} cells at {} m, {} occupied ({} inflated)",
        arena.name,
        g.width,
        g.height,
        g.resolution,
        maps.prior.occupied_count(),
        maps.inflated.occupied_count()
    );
    println!("wrote {} and {}", prior.display(), inflated.display());
    Ok(())
}

fn fmt_metric(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.3}")).unwrap_or_else(|| "-".into())
}

pub fn cmd_detect(common: &Common, args: &DetectArgs) -> Result<(), Failure> {
    let mut cfg = resolve(
        common,
        RunConfig {
            map: args.map.clone(),
            robots: args.robots.clone(),
            intruders: args.intruders.clone(),
            stationary: args.stationary,
            frames: args.frames,
            duration: args.duration,
            noise_sigma: args.noise_sigma,
            pursuit: args.pursuit.then_some(true),
            ..RunConfig::default()
        },
    )?;
    if cfg.frames.is_some() && cfg.duration.is_some() {
        return Err(usage(anyhow!("set either frames or duration, not both")));
    }
    let name = cfg.map.clone().unwrap_or_else(|| "map1".into());
    let mut sim = sim_config(&cfg, common);
    let arena = arena(&name, cfg.door_width, &mut sim)?;
    let robots = cfg
        .robots
        .clone()
        .unwrap_or(Counts(vec![1]))
        .single()
        .map_err(usage)?;
    let intruders = cfg
        .intruders
        .clone()
        .unwrap_or(Counts(vec![8]))
        .single()
        .map_err(usage)?;
    let stationary = cfg.stationary.unwrap_or(intruders.min(3));
    if stationary > intruders {
        return Err(usage(anyhow!(
            "{stationary} stationary intruders exceed the {intruders} requested"
        )));
    }
    let frames = match cfg.duration {
        Some(d) if d > 0.0 => (d * sim.sensor.rate).round() as u64,
        Some(d) => return Err(usage(anyhow!("duration {d} must be positive"))),
        None => cfg.frames.unwrap_or(1999),
    };
    let scenario = DetectionScenario {
        arena,
        sim,
        robots,
        robot_poses: cfg
            .robot_poses
            .iter()
            .flatten()
            .map(|&[x, y, h]| Pose::new(x, y, h))
            .collect(),
        mobile_intruders: intruders - stationary,
        stationary_intruders: stationary,
        intruder_radius: cfg.intruder_radius.unwrap_or(0.1),
        frames,
        seed: cfg.seed.expect("seed resolved"),
        ..DetectionScenario::default()
    };
    scenario.validate().map_err(usage)?;

    let dir = out_dir(common)?.to_path_buf();
    cfg.map = Some(name);
    cfg.robots = Some(Counts(vec![robots]));
    cfg.intruders = Some(Counts(vec![intruders]));
    cfg.stationary = Some(stationary);
    cfg.intruder_radius = Some(scenario.intruder_radius);
    if cfg.duration.is_none() {
        cfg.frames = Some(frames);
    }
    record_sim(&mut cfg, &scenario.sim);
    write_config(&dir, &cfg)?;

    let run = if common.dump_frames {
        let mut dump = crate::render::FrameDump::create(&dir.join("frames"))?;
        let run = eval::run_detection_trial_with(&scenario, |w, p, _| dump.record(w, p))?;
        dump.finish(&run.fused)?;
        run
    } else {
        eval::run_detection_trial(&scenario)?
    };

    let m = &run.metrics;
    report::write_detection_csv(create(&dir.join("detections.csv"))?, &run.scores, m)?;
    report::write_fused_csv(create(&dir.join("fused.csv"))?, &run.fused)?;
    report::write_events_csv(create(&dir.join("events.csv"))?, &run.events)?;

    println!(
        "{:<6} {:>6} {:>8} {:>8} {:>8} {:>10} {:>8} {:>8} {:>8}",
        "trial", "robots", "tp", "fp", "fn", "precision", "recall", "f1", "frames"
    );
    println!(
        "{:<6} {:>6} {:>8} {:>8} {:>8} {:>10} {:>8} {:>8} {:>8}",
        1,
        robots,
        m.tp,
        m.fp,
        m.fn_,
        fmt_metric(m.precision),
        fmt_metric(m.recall),
        fmt_metric(m.f1),
        m.frames_observed
    );
    Ok(())
}

pub fn cmd_labyrinth(common: &Common, args: &LabyrinthArgs) -> Result<(), Failure> {
    let mut cfg = resolve(
        common,
        RunConfig {
            robots: args.robots.clone(),
            intruders: args.intruders.clone(),
            trials: args.trials,
            time_cap: args.time_cap,
            door_width: args.door_width,
            ..RunConfig::default()
        },
    )?;
    let name = cfg.map.clone().unwrap_or_else(|| "map2".into());
    let mut sim = sim_config(&cfg, common);
    if cfg.pursuit.is_none() {
        sim.pursuit = true;
    }
    let arena = arena(&name, cfg.door_width, &mut sim)?;
    let defaults = LabyrinthScenario::default();
    let scenario = LabyrinthScenario {
        arena,
        sim,
        robot_counts: cfg
            .robots
            .clone()
            .map(|c| c.0)
            .unwrap_or(defaults.robot_counts.clone()),
        intruder_counts: cfg
            .intruders
            .clone()
            .map(|c| c.0)
            .unwrap_or(defaults.intruder_counts.clone()),
        trials: cfg.trials.unwrap_or(defaults.trials),
        time_cap: cfg.time_cap.unwrap_or(defaults.time_cap),
        intruder_radius: cfg.intruder_radius.unwrap_or(defaults.intruder_radius),
        seed: cfg.seed.expect("seed resolved"),
        ..defaults
    };
    scenario.validate().map_err(usage)?;

    let dir = out_dir(common)?.to_path_buf();
    cfg.map = Some(name);
    cfg.robots = Some(Counts(scenario.robot_counts.clone()));
    cfg.intruders = Some(Counts(scenario.intruder_counts.clone()));
    cfg.trials = Some(scenario.trials);
    cfg.time_cap = Some(scenario.time_cap);
    cfg.intruder_radius = Some(scenario.intruder_radius);
    record_sim(&mut cfg, &scenario.sim);
    write_config(&dir, &cfg)?;

    let result = eval::run_labyrinth_campaign(&scenario)?;
    report::write_campaign_csv(create(&dir.join("campaign.csv"))?, &result.outcomes)?;
    report::write_mean_success_csv(create(&dir.join("mean_success.csv"))?, &result.cells)?;
    let svg = chart::success_chart(&result.cells);
    fs::write(dir.join("success.svg"), svg).context("writing success.svg")?;

    let mut out = std::io::stdout().lock();
    write!(out, "{:<18}", "intruders\\robots")?;
    for n in &scenario.robot_counts {
        write!(out, "{n:>8}")?;
    }
    writeln!(out)?;
    for row in &result.cells {
        write!(out, "{:<18}", row[0].n_intruders)?;
        for c in row {
            write!(out, "{:>8.1}", c.mean_success)?;
        }
        writeln!(out)?;
    }
    writeln!(
        out,
        "{} trials; mean success (%) per cell written to {}",
        result.outcomes.len(),
        dir.join("mean_success.csv").display()
    )?;
    Ok(())
}
