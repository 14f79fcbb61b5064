//! Three-channel images of a vector field: quiver, streamlines and speed
//! heatmap, each in `[0, 1]`.

mod draw;
mod io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cloud::{lattice_side, DOMAIN_MAX, DOMAIN_MIN, DOMAIN_WIDTH};
use crate::hamfield::{CompiledField, FieldSample};
use draw::{Canvas, Grid};

pub use io::{png_paths, HEADER_LEN, MAGIC, VERSION};

pub const CHANNELS: usize = 3;
pub const CHANNEL_SUFFIXES: [&str; CHANNELS] = ["q", "s", "h"];
pub const QUIVER: usize = 0;
pub const STREAM: usize = 1;
pub const HEAT: usize = 2;

pub const MIN_RESOLUTION: u32 = 32;
pub const MAX_RESOLUTION: u32 = 1024;
const ARROW_SCALE: f64 = 0.9;
const MIN_SPEED: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum RasterError {
    #[error("resolution {0} outside [{MIN_RESOLUTION}, {MAX_RESOLUTION}]")]
    Resolution(u32),
    #[error("invalid render config: {0}")]
    Config(String),
    #[error("not a SYMF tensor")]
    BadMagic,
    #[error("unsupported SYMF version {0}")]
    BadVersion(u32),
    #[error("unsupported tensor shape {h}x{w}x{c}")]
    BadShape { h: u32, w: u32, c: u32 },
    #[error("tensor data truncated or oversized")]
    Truncated,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Png(#[from] png::EncodingError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenderConfig {
    pub resolution: u32,
    pub domain: [f64; 2],
    pub stream_seeds: u32,
    pub rk4_step: f64,
    pub max_steps: u32,
}

impl Default for RenderConfig {
    fn default() -> Self {
        RenderConfig {
            resolution: 128,
            domain: [DOMAIN_MIN, DOMAIN_MAX],
            stream_seeds: 7,
            rk4_step: 0.2,
            max_steps: 300,
        }
    }
}

impl RenderConfig {
    pub fn with_resolution(resolution: u32) -> Result<Self, RasterError> {
        let cfg = RenderConfig {
            resolution,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), RasterError> {
        if !(MIN_RESOLUTION..=MAX_RESOLUTION).contains(&self.resolution) {
            return Err(RasterError::Resolution(self.resolution));
        }
        if self.domain != [DOMAIN_MIN, DOMAIN_MAX] {
            return Err(RasterError::Config("domain is fixed to [-10, 10]".into()));
        }
        if self.stream_seeds == 0 {
            return Err(RasterError::Config("stream_seeds must be positive".into()));
        }
        if !(self.rk4_step.is_finite() && self.rk4_step > 0.0) {
            return Err(RasterError::Config("rk4_step must be positive".into()));
        }
        Ok(())
    }

    fn grid(&self) -> Grid {
        Grid {
            res: self.resolution as usize,
        }
    }
}

/// Channel-major `3 x res x res` f32 image.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    res: usize,
    data: Vec<f32>,
}

impl Raster {
    pub fn blank(res: usize) -> Self {
        Raster {
            res,
            data: vec![0.0; CHANNELS * res * res],
        }
    }

    pub fn from_data(res: usize, data: Vec<f32>) -> Result<Self, RasterError> {
        if data.len() != CHANNELS * res * res {
            return Err(RasterError::Truncated);
        }
        Ok(Raster { res, data })
    }

    pub fn from_channels(res: usize, channels: [&[f32]; CHANNELS]) -> Self {
        let mut data = Vec::with_capacity(CHANNELS * res * res);
        for c in channels {
            assert_eq!(c.len(), res * res, "channel size");
            data.extend_from_slice(c);
        }
        Raster { res, data }
    }

    pub fn resolution(&self) -> usize {
        self.res
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn channel(&self, c: usize) -> &[f32] {
        let n = self.res * self.res;
        &self.data[c * n..(c + 1) * n]
    }

    /// Value at `(channel, row, col)`.
    pub fn get(&self, c: usize, row: usize, col: usize) -> f32 {
        self.channel(c)[row * self.res + col]
    }
}

/// Segment from each unflagged point `p` to `p + 0.9 * pitch * v / V_max`.
pub fn quiver_channel(sample: &FieldSample, cfg: &RenderConfig) -> Vec<f32> {
    let res = cfg.resolution as usize;
    let mut pixels = vec![0.0; res * res];
    let v_max = sample.max_norm();
    if !(v_max.is_finite() && v_max > 0.0) {
        return pixels;
    }
    let side = lattice_side(sample.len()).unwrap_or(2);
    let pitch = DOMAIN_WIDTH / (side - 1) as f64;
    let scale = ARROW_SCALE * pitch / v_max;
    let grid = cfg.grid();
    let mut canvas = Canvas {
        res,
        pixels: &mut pixels,
    };
    for ((&(x, y), &(u, v)), &nan) in sample.points.iter().zip(&sample.vectors).zip(&sample.nan) {
        if nan {
            continue;
        }
        let from = grid.locate_clamped(x, y);
        let to = grid.locate(x + scale * u, y + scale * v);
        canvas.line(from, to);
    }
    pixels
}

fn unit_velocity(field: &CompiledField, p: (f64, f64), dir: f64) -> Option<(f64, f64)> {
    let (u, v) = field.eval(p.0, p.1);
    let speed = u.hypot(v);
    if speed.is_nan() || speed < MIN_SPEED || !speed.is_finite() {
        return None;
    }
    Some((dir * u / speed, dir * v / speed))
}

fn rk4_step(field: &CompiledField, p: (f64, f64), h: f64, dir: f64) -> Option<(f64, f64)> {
    let at = |q: (f64, f64), k: (f64, f64), s: f64| (q.0 + s * k.0, q.1 + s * k.1);
    let k1 = unit_velocity(field, p, dir)?;
    let k2 = unit_velocity(field, at(p, k1, h / 2.0), dir)?;
    let k3 = unit_velocity(field, at(p, k2, h / 2.0), dir)?;
    let k4 = unit_velocity(field, at(p, k3, h), dir)?;
    Some((
        p.0 + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        p.1 + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
    ))
}

fn in_domain(p: (f64, f64)) -> bool {
    (DOMAIN_MIN..=DOMAIN_MAX).contains(&p.0) && (DOMAIN_MIN..=DOMAIN_MAX).contains(&p.1)
}

/// RK4 traces of the normalized field from a uniform seed grid, forwards and
/// backwards in time. Depends only on the field, not on a cloud.
pub fn streamline_channel(field: &CompiledField, cfg: &RenderConfig) -> Vec<f32> {
    let res = cfg.resolution as usize;
    let mut pixels = vec![0.0; res * res];
    let grid = cfg.grid();
    let mut canvas = Canvas {
        res,
        pixels: &mut pixels,
    };
    let n = cfg.stream_seeds as usize;
    let cell = DOMAIN_WIDTH / n as f64;
    for row in 0..n {
        for col in 0..n {
            let seed = (
                DOMAIN_MIN + (col as f64 + 0.5) * cell,
                DOMAIN_MIN + (row as f64 + 0.5) * cell,
            );
            for dir in [1.0, -1.0] {
                let mut p = seed;
                for _ in 0..cfg.max_steps {
                    let Some(next) = rk4_step(field, p, cfg.rk4_step, dir) else {
                        break;
                    };
                    if !in_domain(next) {
                        break;
                    }
                    canvas.line(grid.locate_clamped(p.0, p.1), grid.locate_clamped(next.0, next.1));
                    p = next;
                }
            }
        }
    }
    pixels
}

/// `|X|` at pixel centres over its own maximum; undefined pixels are 0.
pub fn heatmap_channel(field: &CompiledField, cfg: &RenderConfig) -> Vec<f32> {
    let res = cfg.resolution as usize;
    let grid = cfg.grid();
    let norms: Vec<f64> = (0..res * res)
        .map(|i| {
            let (x, y) = grid.center(i % res, i / res);
            let (u, v) = field.eval(x, y);
            let n = u.hypot(v);
            if n.is_finite() {
                n
            } else {
                f64::NAN
            }
        })
        .collect();
    let max = norms.iter().copied().filter(|n| !n.is_nan()).fold(0.0, f64::max);
    if max <= 0.0 {
        return vec![0.0; res * res];
    }
    norms
        .iter()
        .map(|n| if n.is_nan() { 0.0 } else { (n / max) as f32 })
        .collect()
}

/// Renders all three channels of one sample.
pub fn render(sample: &FieldSample, field: &CompiledField, cfg: &RenderConfig) -> Raster {
    let q = quiver_channel(sample, cfg);
    let s = streamline_channel(field, cfg);
    let h = heatmap_channel(field, cfg);
    Raster::from_channels(cfg.resolution as usize, [&q, &s, &h])
}
