//! Frame dumps and their PNG rendering.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use image::{Rgb, RgbImage};
use sentry_core::eval::report;
use sentry_core::fusion::Detection;
use sentry_core::gridmap::{read_pgm, write_pgm, BinaryGrid, Pgm};
use sentry_core::localview::BBox;
use sentry_core::sim::{Perception, WorldModel};

use crate::commands::create;
use crate::{Common, Failure, RenderArgs};

const WINDOWS_HEADER: &str = "frame,robot,local_tl_x,local_tl_y,local_br_x,local_br_y,global_tl_x,global_tl_y,global_br_x,global_br_y";
const PANELS: [&str; 4] = ["A", "B", "C", "D"];
const GAP: u32 = 2;

fn panel_name(robot: usize, frame: u64, tag: &str) -> String {
    format!("r{robot}_f{frame}_{tag}.pgm")
}

/// Writes every robot's A/B/C/D grids per frame plus a window index.
pub struct FrameDump {
    dir: PathBuf,
    windows: String,
    global: Option<BinaryGrid>,
}

impl FrameDump {
    pub fn create(dir: &Path) -> anyhow::Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            windows: format!("{WINDOWS_HEADER}\n"),
            global: None,
        })
    }

    pub fn record(&mut self, world: &WorldModel, p: &Perception) -> sentry_core::Result<()> {
        if self.global.is_none() {
            self.global = Some(world.maps.inflated.clone());
        }
        for f in &p.local {
            let id = f.robot_id.0;
            for (tag, grid) in PANELS.iter().zip([&f.a, &f.b, &f.c, &f.d]) {
                write_pgm(grid, &self.dir.join(panel_name(id, p.frame, tag)))?;
            }
            let w = f.window;
            self.windows.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                p.frame,
                id,
                w.local_tl.x,
                w.local_tl.y,
                w.local_br.x,
                w.local_br.y,
                w.global_tl.x,
                w.global_tl.y,
                w.global_br.x,
                w.global_br.y
            ));
        }
        Ok(())
    }

    pub fn finish(self, fused: &[Detection]) -> anyhow::Result<()> {
        let path = self.dir.join("windows.csv");
        fs::write(&path, &self.windows).with_context(|| format!("writing {}", path.display()))?;
        if let Some(g) = &self.global {
            write_pgm(g, &self.dir.join("global.pgm"))?;
        }
        report::write_fused_csv(create(&self.dir.join("fused.csv"))?, fused)?;
        Ok(())
    }
}

struct WindowRow {
    frame: u64,
    robot: usize,
    span: (u32, u32),
}

fn read_windows(path: &Path) -> anyhow::Result<Vec<WindowRow>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut rows = Vec::new();
    for (n, line) in text.lines().enumerate().skip(1) {
        let v: Vec<i64> = line
            .split(',')
            .map(|s| s.trim().parse::<i64>())
            .collect::<Result<_, _>>()
            .with_context(|| format!("{}: line {}", path.display(), n + 1))?;
        if v.len() != 10 {
            bail!(
                "{}: line {} has {} fields, expected 10",
                path.display(),
                n + 1,
                v.len()
            );
        }
        rows.push(WindowRow {
            frame: v[0] as u64,
            robot: v[1] as usize,
            span: ((v[4] - v[2]) as u32, (v[5] - v[3]) as u32),
        });
    }
    Ok(rows)
}

fn read_fused(path: &Path) -> anyhow::Result<Vec<(u64, BBox)>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .skip(1)
        .enumerate()
        .map(|(n, line)| {
            let v: Vec<i64> = line
                .split(',')
                .map(|s| s.trim().parse::<i64>())
                .collect::<Result<_, _>>()
                .with_context(|| format!("{}: line {}", path.display(), n + 2))?;
            match v.as_slice() {
                [f, x1, y1, x2, y2, _] => Ok((
                    *f as u64,
                    BBox {
                        x1: *x1,
                        y1: *y1,
                        x2: *x2,
                        y2: *y2,
                    },
                )),
                _ => Err(anyhow!(
                    "{}: line {} has {} fields",
                    path.display(),
                    n + 2,
                    v.len()
                )),
            }
        })
        .collect()
}

fn gray(v: u8) -> Rgb<u8> {
    Rgb([v, v, v])
}

/// The four panels side by side, separated by gray gaps.
pub fn compose_panels(panels: &[Pgm]) -> anyhow::Result<RgbImage> {
    let (w, h) = (panels[0].width as u32, panels[0].height as u32);
    if panels
        .iter()
        .any(|p| p.width as u32 != w || p.height as u32 != h)
    {
        bail!("panels differ in size");
    }
    let n = panels.len() as u32;
    let mut img = RgbImage::from_pixel(n * w + (n - 1) * GAP, h, gray(128));
    for (k, p) in panels.iter().enumerate() {
        let x0 = k as u32 * (w + GAP);
        for y in 0..h {
            for x in 0..w {
                img.put_pixel(x0 + x, y, gray(p.pixels[(y * w + x) as usize]));
            }
        }
    }
    Ok(img)
}

/// Global map with a red outline for each box. Grid row 0 is the bottom
/// image row.
pub fn overlay_boxes(global: &Pgm, boxes: &[BBox]) -> RgbImage {
    let (w, h) = (global.width as i64, global.height as i64);
    let mut img = RgbImage::from_fn(w as u32, h as u32, |x, y| {
        gray(global.pixels[(y as i64 * w + x as i64) as usize])
    });
    let red = Rgb([220, 30, 30]);
    let mut put = |x: i64, y: i64| {
        if (0..w).contains(&x) && (0..h).contains(&y) {
            img.put_pixel(x as u32, (h - 1 - y) as u32, red);
        }
    };
    for b in boxes {
        for x in b.x1..b.x2 {
            put(x, b.y1);
            put(x, b.y2 - 1);
        }
        for y in b.y1..b.y2 {
            put(b.x1, y);
            put(b.x2 - 1, y);
        }
    }
    img
}

pub fn cmd_render(common: &Common, args: &RenderArgs) -> Result<(), Failure> {
    let dump = args
        .dump
        .clone()
        .unwrap_or_else(|| common.out.join("frames"));
    if !dump.is_dir() {
        return Err(anyhow!("dump directory {} not found", dump.display()).into());
    }
    let windows = dump.join("windows.csv");
    if !windows.is_file() {
        return Err(anyhow!(
            "{} holds no frame dump (windows.csv missing)",
            dump.display()
        )
        .into());
    }
    let rows: Vec<WindowRow> = read_windows(&windows)?
        .into_iter()
        .filter(|r| args.frame.is_none_or(|f| f == r.frame))
        .collect();
    if rows.is_empty() {
        return Err(anyhow!("no frames to render in {}", dump.display()).into());
    }
    let out = common.out.join("render");
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;

    for r in &rows {
        let panels = PANELS
            .iter()
            .map(|tag| read_pgm(&dump.join(panel_name(r.robot, r.frame, tag))))
            .collect::<Result<Vec<_>, _>>()?;
        if (panels[0].width as u32, panels[0].height as u32) != r.span {
            return Err(anyhow!(
                "frame {} robot {}: panel is {}x{} but the window is {}x{}",
                r.frame,
                r.robot,
                panels[0].width,
                panels[0].height,
                r.span.0,
                r.span.1
            )
            .into());
        }
        let path = out.join(format!("r{}_f{}.png", r.robot, r.frame));
        compose_panels(&panels)?
            .save(&path)
            .with_context(|| format!("writing {}", path.display()))?;
    }

    let global = read_pgm(&dump.join("global.pgm"))?;
    let fused = read_fused(&dump.join("fused.csv"))?;
    let frames: BTreeSet<u64> = rows.iter().map(|r| r.frame).collect();
    for &f in &frames {
        let boxes: Vec<BBox> = fused
            .iter()
            .filter(|(k, _)| *k == f)
            .map(|(_, b)| *b)
            .collect();
        let path = out.join(format!("global_f{f}.png"));
        overlay_boxes(&global, &boxes)
            .save(&path)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let mut stdout = std::io::stdout().lock();
    writeln!(
        stdout,
        "rendered {} panel images and {} global views into {}",
        rows.len(),
        frames.len(),
        out.display()
    )?;
    Ok(())
}
