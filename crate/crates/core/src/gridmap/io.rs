//! Map-server compatible persistence: a binary PGM image (P5, maxval 255,
//! occupied = pixel 0) plus a YAML sidecar carrying resolution and origin.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{BinaryGrid, Georeferenced, GridGeometry, WorldPoint, FREE, OCCUPIED};
use crate::error::{Error, Result};

/// Contents of the YAML sidecar.
#[derive(Debug, Clone, PartialEq)]
pub struct MapMetadata {
    pub image: String,
    pub resolution: f64,
    pub origin: [f64; 3],
    pub negate: bool,
    pub occupied_thresh: f64,
    pub free_thresh: f64,
}

impl MapMetadata {
    fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "image: {}", self.image);
        let _ = writeln!(s, "resolution: {:?}", self.resolution);
        let _ = writeln!(
            s,
            "origin: [{:?}, {:?}, {:?}]",
            self.origin[0], self.origin[1], self.origin[2]
        );
        let _ = writeln!(s, "negate: {}", u8::from(self.negate));
        let _ = writeln!(s, "occupied_thresh: {:?}", self.occupied_thresh);
        let _ = writeln!(s, "free_thresh: {:?}", self.free_thresh);
        s
    }

    fn parse(text: &str, file: &Path) -> Result<Self> {
        let perr = |field: &str, reason: String| Error::Parse {
            file: file.to_path_buf(),
            field: field.to_string(),
            reason,
        };
        let mut image = None;
        let mut resolution = None;
        let mut origin = None;
        let mut negate = false;
        let mut occupied_thresh = 0.65;
        let mut free_thresh = 0.196;

        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once(':') else {
                return Err(perr(line, "expected `key: value`".into()));
            };
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| -> Result<f64> {
                v.parse::<f64>()
                    .map_err(|e| perr(key, format!("`{v}` is not a number ({e})")))
            };
            match key {
                "image" => image = Some(value.trim_matches(|c| c == '"' || c == '\'').to_string()),
                "resolution" => resolution = Some(num(value)?),
                "origin" => {
                    let inner = value
                        .strip_prefix('[')
                        .and_then(|v| v.strip_suffix(']'))
                        .ok_or_else(|| perr(key, format!("`{value}` is not a [x, y, yaw] list")))?;
                    let parts = inner
                        .split(',')
                        .map(|p| num(p.trim()))
                        .collect::<Result<Vec<_>>>()?;
                    if parts.len() != 3 {
                        return Err(perr(key, format!("expected 3 values, got {}", parts.len())));
                    }
                    origin = Some([parts[0], parts[1], parts[2]]);
                }
                "negate" => {
                    negate = match value {
                        "0" | "false" => false,
                        "1" | "true" => true,
                        _ => return Err(perr(key, format!("`{value}` is not 0 or 1"))),
                    }
                }
                "occupied_thresh" => occupied_thresh = num(value)?,
                "free_thresh" => free_thresh = num(value)?,
                _ => {}
            }
        }

        let resolution = resolution.ok_or_else(|| perr("resolution", "missing".into()))?;
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(perr("resolution", format!("{resolution} is not positive")));
        }
        Ok(Self {
            image: image.ok_or_else(|| perr("image", "missing".into()))?,
            resolution,
            origin: origin.ok_or_else(|| perr("origin", "missing".into()))?,
            negate,
            occupied_thresh,
            free_thresh,
        })
    }
}

/// Raw 8-bit graymap, rows stored top-down as in the file.
#[derive(Debug, Clone, PartialEq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

/// Write a grid as a P5 image with row 0 of the grid at the bottom.
pub fn write_pgm(grid: &BinaryGrid, path: &Path) -> Result<()> {
    let (w, h) = (grid.width(), grid.height());
    let mut bytes = format!("P5\n{w} {h}\n255\n").into_bytes();
    bytes.reserve(w * h);
    for y in (0..h).rev() {
        bytes.extend_from_slice(&grid.cells()[y * w..(y + 1) * w]);
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_pgm(path: &Path) -> Result<Pgm> {
    let data = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_pgm(&data, path)
}

fn parse_pgm(data: &[u8], file: &Path) -> Result<Pgm> {
    let perr = |field: &str, reason: String| Error::Parse {
        file: file.to_path_buf(),
        field: field.to_string(),
        reason,
    };
    let mut pos = 0usize;
    let mut token = |field: &str| -> Result<String> {
        loop {
            while pos < data.len() && data[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < data.len() && data[pos] == b'#' {
                while pos < data.len() && data[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < data.len() && !data[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(perr(field, "unexpected end of header".into()));
        }
        Ok(String::from_utf8_lossy(&data[start..pos]).into_owned())
    };

    let magic = token("magic")?;
    if magic != "P5" {
        return Err(perr("magic", format!("`{magic}` is not P5")));
    }
    let mut dim = |field: &'static str| -> Result<usize> {
        let t = token(field)?;
        t.parse::<usize>()
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| perr(field, format!("`{t}` is not a positive integer")))
    };
    let width = dim("width")?;
    let height = dim("height")?;
    let maxval = dim("maxval")?;
    if maxval > 255 {
        return Err(perr("maxval", format!("{maxval} needs 16-bit samples")));
    }
    // Exactly one whitespace byte separates the header from the raster.
    let payload = data.get(pos + 1..).unwrap_or(&[]);
    if payload.len() != width * height {
        return Err(Error::Integrity {
            file: file.to_path_buf(),
            reason: format!(
                "header declares {width}x{height} = {} pixels, payload has {}",
                width * height,
                payload.len()
            ),
        });
    }
    Ok(Pgm {
        width,
        height,
        pixels: payload.to_vec(),
    })
}

fn image_path_for(yaml: &Path) -> PathBuf {
    yaml.with_extension("pgm")
}

/// Save `grid` as `<stem>.pgm` next to the YAML file at `yaml_path`.
pub fn save_map(grid: &BinaryGrid, yaml_path: &Path) -> Result<()> {
    let image = image_path_for(yaml_path);
    write_pgm(grid, &image)?;
    let geom = grid.geometry();
    let meta = MapMetadata {
        image: image
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
        resolution: geom.resolution,
        origin: [geom.origin.x, geom.origin.y, 0.0],
        negate: false,
        occupied_thresh: 0.65,
        free_thresh: 0.196,
    };
    fs::write(yaml_path, meta.render()).map_err(|e| Error::io(yaml_path, e))
}

/// Load a map from its YAML sidecar. Pixels whose occupancy probability
/// exceeds `occupied_thresh` become occupied; free and unknown become free.
pub fn load_map(yaml_path: &Path) -> Result<BinaryGrid> {
    let text = fs::read_to_string(yaml_path).map_err(|e| Error::io(yaml_path, e))?;
    let meta = MapMetadata::parse(&text, yaml_path)?;
    let image = yaml_path
        .parent()
        .map(|d| d.join(&meta.image))
        .unwrap_or_else(|| PathBuf::from(&meta.image));
    let pgm = read_pgm(&image)?;
    let geom = GridGeometry::new(
        pgm.width,
        pgm.height,
        meta.resolution,
        WorldPoint::new(meta.origin[0], meta.origin[1]),
    )?;

    let mut cells = Vec::with_capacity(geom.len());
    for y in (0..pgm.height).rev() {
        for &p in &pgm.pixels[y * pgm.width..(y + 1) * pgm.width] {
            let p = f64::from(p) / 255.0;
            let occ = if meta.negate { p } else { 1.0 - p };
            cells.push(if occ > meta.occupied_thresh {
                OCCUPIED
            } else {
                FREE
            });
        }
    }
    Ok(BinaryGrid::from_raw(geom, cells))
}
