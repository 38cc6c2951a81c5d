//! Basin-of-attraction rasters and binary PPM output.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certification::{AttractorLocator, PeriodicAttractor};
use crate::dynamics::MapParams;
use crate::error::{Error, Result};
use crate::Point;

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl BBox {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        if !(x1 > x0 && y1 > y0) {
            return Err(Error::ParameterOutOfRange(format!(
                "empty bounding box [{x0}, {x1}] x [{y0}, {y1}]"
            )));
        }
        Ok(Self { x0, y0, x1, y1 })
    }

    /// Square circumscribing the trap disc.
    pub fn around_trap(params: &MapParams) -> Self {
        let r = params.trap().r;
        Self {
            x0: -r,
            y0: -r,
            x1: r,
            y1: r,
        }
    }

    /// Center of pixel `(col, row)`; row 0 is the top (largest y).
    pub fn pixel_center(&self, col: usize, row: usize, width: usize, height: usize) -> Point {
        let x = self.x0 + (self.x1 - self.x0) * (col as f64 + 0.5) / width as f64;
        let y = self.y1 - (self.y1 - self.y0) * (row as f64 + 0.5) / height as f64;
        Point::new(x, y)
    }
}

pub const LABEL_SINGULAR: i32 = -1;
pub const LABEL_UNRESOLVED: i32 = -2;
pub const LABEL_INSIDE: i32 = -3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasinRaster {
    pub width: usize,
    pub height: usize,
    pub bbox: BBox,
    /// Row-major, top row first.
    pub labels: Vec<i32>,
}

impl BasinRaster {
    pub fn get(&self, col: usize, row: usize) -> i32 {
        self.labels[row * self.width + col]
    }

    /// Number of pixels per label.
    pub fn histogram(&self) -> BTreeMap<i32, usize> {
        let mut h = BTreeMap::new();
        for &l in &self.labels {
            *h.entry(l).or_insert(0) += 1;
        }
        h
    }

    pub fn attractor_labels(&self) -> Vec<i32> {
        self.histogram().into_keys().filter(|&l| l >= 0).collect()
    }
}

/// Labels every pixel center by the attractor its orbit reaches.
pub fn render_basins(
    params: &MapParams,
    attractors: &[PeriodicAttractor],
    bbox: BBox,
    width: usize,
    height: usize,
    max_iter: usize,
    tol: f64,
) -> Result<BasinRaster> {
    if width == 0 || height == 0 {
        return Err(Error::ParameterOutOfRange("raster must have positive size".into()));
    }
    let locator = AttractorLocator::new(attractors, tol)?;
    let rows: Vec<Vec<i32>> = (0..height)
        .into_par_iter()
        .map(|row| {
            (0..width)
                .map(|col| {
                    let z = bbox.pixel_center(col, row, width, height);
                    locator.assign(params, z, max_iter).label()
                })
                .collect()
        })
        .collect();
    Ok(BasinRaster {
        width,
        height,
        bbox,
        labels: rows.concat(),
    })
}

pub type Rgb = [u8; 3];

/// Label → color map.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Palette(pub BTreeMap<i32, Rgb>);

impl Palette {
    /// Fixed colors for the special labels and a golden-angle hue walk for
    /// attractor indices `0..count`.
    pub fn default_for(count: usize) -> Self {
        let mut map = BTreeMap::new();
        map.insert(LABEL_SINGULAR, [255, 255, 255]);
        map.insert(LABEL_UNRESOLVED, [128, 128, 128]);
        map.insert(LABEL_INSIDE, [0, 0, 0]);
        for i in 0..count {
            let hue = (i as f64 * 137.508).rem_euclid(360.0);
            map.insert(i as i32, hsv_to_rgb(hue, 0.65, 0.95));
        }
        Self(map)
    }

    /// Lines `label r g b`; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(Error::parse(i + 1, "expected `label r g b`"));
            }
            let label: i32 = fields[0]
                .parse()
                .map_err(|_| Error::parse(i + 1, format!("bad label {:?}", fields[0])))?;
            let mut rgb = [0u8; 3];
            for (c, f) in rgb.iter_mut().zip(&fields[1..]) {
                *c = f
                    .parse()
                    .map_err(|_| Error::parse(i + 1, format!("bad color component {f:?}")))?;
            }
            map.insert(label, rgb);
        }
        Ok(Self(map))
    }

    pub fn color(&self, label: i32) -> Option<Rgb> {
        self.0.get(&label).copied()
    }
}

fn hsv_to_rgb(h: f64, s: f64, v: f64) -> Rgb {
    let c = v * s;
    let hp = h / 60.0;
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    let to8 = |u: f64| ((u + m) * 255.0).round().clamp(0.0, 255.0) as u8;
    [to8(r), to8(g), to8(b)]
}

/// Binary P6 encoding of the raster.
pub fn encode_ppm(raster: &BasinRaster, palette: &Palette) -> Result<Vec<u8>> {
    let mut out = format!("P6\n{} {}\n255\n", raster.width, raster.height).into_bytes();
    out.reserve(raster.labels.len() * 3);
    for &l in &raster.labels {
        let rgb = palette
            .color(l)
            .ok_or_else(|| Error::ParameterOutOfRange(format!("palette has no color for label {l}")))?;
        out.extend_from_slice(&rgb);
    }
    Ok(out)
}

pub fn write_ppm(raster: &BasinRaster, palette: &Palette, path: &Path) -> Result<()> {
    let bytes = encode_ppm(raster, palette)?;
    let mut f = std::fs::File::create(path)?;
    f.write_all(&bytes)?;
    Ok(())
}
