//! Ultrasound-specific artefacts. All of them act only inside the fan
//! sector and are parameterized by depth from the sector apex.

use crate::error::{EchoError, Result};
use crate::model::*;
use crate::rng::RngStream;

/// Fraction of the fan's rows (from the top) used to fit the straight edges.
const EDGE_FIT_FRACTION: f64 = 0.6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FanGeometry {
    /// Column of the apex (may lie outside the image).
    pub apex_x: f64,
    /// Row of the apex (may lie above the image).
    pub apex_y: f64,
    /// Largest apex distance over all fan pixels.
    pub max_radius: f64,
    /// True when the edge fit failed and the top-centre fallback was used.
    pub fallback: bool,
}

impl FanGeometry {
    /// Normalized depth in `[0, 1]`.
    pub fn depth(&self, x: f64, y: f64) -> f64 {
        if self.max_radius <= 0.0 {
            return 0.0;
        }
        ((x - self.apex_x).hypot(y - self.apex_y) / self.max_radius).clamp(0.0, 1.0)
    }
}

/// Least-squares fit of `x = a + b * y`.
fn fit_line(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let (sy, sx) = points.iter().fold((0.0, 0.0), |acc, &(y, x)| (acc.0 + y, acc.1 + x));
    let (my, mx) = (sy / n, sx / n);
    let (mut syy, mut sxy) = (0.0, 0.0);
    for &(y, x) in points {
        syy += (y - my) * (y - my);
        sxy += (y - my) * (x - mx);
    }
    if syy == 0.0 {
        return None;
    }
    let b = sxy / syy;
    Some((mx - b * my, b))
}

pub fn fit_fan_geometry(fan: &BinaryMask) -> Result<FanGeometry> {
    let (w, h) = fan.dims();
    let mut rows: Vec<(usize, usize, usize)> = Vec::new();
    for y in 0..h {
        let mut first = None;
        let mut last = 0;
        for x in 0..w {
            if fan.get(x, y) {
                first.get_or_insert(x);
                last = x;
            }
        }
        if let Some(f) = first {
            rows.push((y, f, last));
        }
    }
    let Some(&(top_y, top_first, top_last)) = rows.first() else {
        return Err(EchoError::EmptyMask("fan mask"));
    };
    let bottom_y = rows.last().map_or(top_y, |r| r.0);
    let cutoff = top_y as f64 + EDGE_FIT_FRACTION * (bottom_y - top_y) as f64;
    let fit_rows: Vec<_> = rows.iter().filter(|r| r.0 as f64 <= cutoff).collect();
    let left: Vec<(f64, f64)> = fit_rows.iter().map(|r| (r.0 as f64, r.1 as f64)).collect();
    let right: Vec<(f64, f64)> = fit_rows.iter().map(|r| (r.0 as f64, r.2 as f64)).collect();

    let intersection = fit_line(&left).zip(fit_line(&right)).and_then(|((al, bl), (ar, br))| {
        // Edges must diverge downwards for a sector apex to exist.
        if bl - br > -1e-3 {
            return None;
        }
        let y = (ar - al) / (bl - br);
        let x = al + bl * y;
        (y <= top_y as f64 + 1.0 && x.is_finite() && y.is_finite()).then_some((x, y))
    });

    let (apex_x, apex_y, fallback) = match intersection {
        Some((x, y)) => (x, y, false),
        None => ((top_first + top_last) as f64 / 2.0, top_y as f64, true),
    };
    let mut max_radius: f64 = 0.0;
    for y in 0..h {
        for x in 0..w {
            if fan.get(x, y) {
                max_radius = max_radius.max((x as f64 - apex_x).hypot(y as f64 - apex_y));
            }
        }
    }
    Ok(FanGeometry { apex_x, apex_y, max_radius, fallback })
}

fn require_fan<'a>(sample: &'a Sample, transform: &'static str) -> Result<&'a BinaryMask> {
    sample.fan_mask.as_ref().ok_or(EchoError::FanMaskRequired { transform })
}

/// Replaces pixels inside the fan by `f(x, y, value)`; outside pixels are copied bit-exactly.
fn inside_fan(img: &GrayImage, fan: &BinaryMask, f: impl Fn(usize, usize, f64) -> f64) -> GrayImage {
    let (w, h) = img.dims();
    let mut px = img.pixels().to_vec();
    for y in 0..h {
        for x in 0..w {
            if fan.get(x, y) {
                let i = y * w + x;
                px[i] = f(x, y, px[i]);
            }
        }
    }
    GrayImage::from_clamped(w, h, px)
}

/// `1 - min(max_attenuation, 1) * (1 - exp(-rate * depth))`.
pub fn attenuation_gain(depth: f64, rate: f64, max_attenuation: f64) -> f64 {
    1.0 - max_attenuation.min(1.0) * (1.0 - (-rate * depth).exp())
}

pub fn depth_attenuation_with(img: &GrayImage, fan: &BinaryMask, geo: &FanGeometry, rate: f64, max_attenuation: f64) -> GrayImage {
    if rate == 0.0 || max_attenuation == 0.0 {
        return img.clone();
    }
    inside_fan(img, fan, |x, y, v| v * attenuation_gain(geo.depth(x as f64, y as f64), rate, max_attenuation))
}

pub fn depth_attenuation(sample: &Sample, p: &DepthAttenuationParams, rng: &mut RngStream) -> Result<GrayImage> {
    let fan = require_fan(sample, "DepthAttenuation")?;
    let rate = rng.range(p.rate.lo(), p.rate.hi());
    if rate == 0.0 || p.max_attenuation == 0.0 {
        return Ok(sample.image.clone());
    }
    let geo = fit_fan_geometry(fan)?;
    Ok(depth_attenuation_with(&sample.image, fan, &geo, rate, p.max_attenuation))
}

/// Multiplicative factor of a shadow centred at `(cx, cy)` with pixel sigmas.
pub fn shadow_factor(x: f64, y: f64, cx: f64, cy: f64, strength: f64, sx: f64, sy: f64) -> f64 {
    let u = (x - cx) / sx;
    let v = (y - cy) / sy;
    1.0 - strength * (-(u * u + v * v) / 2.0).exp()
}

pub fn gaussian_shadow(sample: &Sample, p: &ShadowParams, rng: &mut RngStream) -> Result<GrayImage> {
    let fan = require_fan(sample, "GaussianShadow")?;
    let (w, h) = sample.dims();
    let strength = rng.range(p.strength.lo(), p.strength.hi());
    let sx = rng.range(p.sigma_x.lo(), p.sigma_x.hi()) * w as f64;
    let sy = rng.range(p.sigma_y.lo(), p.sigma_y.hi()) * h as f64;
    let count = fan.count();
    if count == 0 {
        return Err(EchoError::EmptyMask("fan mask"));
    }
    let pick = rng.int_range(0, count as i64 - 1) as usize;
    if strength == 0.0 {
        return Ok(sample.image.clone());
    }
    let centre = fan
        .values()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0)
        .nth(pick)
        .map(|(i, _)| ((i % w) as f64, (i / w) as f64))
        .expect("pick is below the fan pixel count");
    Ok(inside_fan(&sample.image, fan, |x, y, v| {
        v * shadow_factor(x as f64, y as f64, centre.0, centre.1, strength, sx, sy)
    }))
}

/// Additive haze at depth `d` for a band at `radius` of width `sigma`.
pub fn haze_profile(d: f64, radius: f64, sigma: f64, amplitude: f64) -> f64 {
    let z = (d - radius) / sigma;
    amplitude * (-(z * z) / 2.0).exp()
}

pub fn haze_artifact(sample: &Sample, p: &HazeParams, rng: &mut RngStream) -> Result<GrayImage> {
    let fan = require_fan(sample, "HazeArtifact")?;
    let radius = rng.range(p.radius.lo(), p.radius.hi());
    let sigma = rng.range(p.sigma.lo(), p.sigma.hi());
    if p.amplitude == 0.0 || sigma <= 0.0 {
        return Ok(sample.image.clone());
    }
    let geo = fit_fan_geometry(fan)?;
    Ok(inside_fan(&sample.image, fan, |x, y, v| {
        v + haze_profile(geo.depth(x as f64, y as f64), radius, sigma, p.amplitude)
    }))
}
