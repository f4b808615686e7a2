//! Spatial transforms. Every function builds one backward coordinate map and
//! applies it to all rasters of the sample, so image and masks always move
//! together. Masks are sampled with nearest neighbour.

use super::ApplyOptions;
use crate::error::{EchoError, Result};
use crate::imgops::{self, CoordMap, Rect, WarpOptions};
use crate::model::*;
use crate::rng::RngStream;

const MAX_RECT_ATTEMPTS: usize = 10;
const MAX_PERSPECTIVE_ATTEMPTS: usize = 10;

fn center(w: usize, h: usize) -> (f64, f64) {
    ((w as f64 - 1.0) * 0.5, (h as f64 - 1.0) * 0.5)
}

/// `(sin, cos)` of an angle in degrees, exact at multiples of 90.
pub fn sin_cos_deg(deg: f64) -> (f64, f64) {
    if deg.rem_euclid(90.0) == 0.0 {
        match (deg / 90.0).rem_euclid(4.0) as i64 {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        }
    } else {
        deg.to_radians().sin_cos()
    }
}

pub fn horizontal_flip(sample: &Sample) -> Sample {
    let (w, h) = sample.dims();
    let flip_image = |img: &GrayImage| {
        let px = img.pixels();
        let mut out = Vec::with_capacity(w * h);
        for y in 0..h {
            out.extend(px[y * w..(y + 1) * w].iter().rev());
        }
        GrayImage::from_clamped(w, h, out)
    };
    let flip_mask = |m: &BinaryMask| BinaryMask::from_fn(w, h, |x, y| m.get(w - 1 - x, y));
    Sample {
        image: flip_image(&sample.image),
        lv_mask: flip_mask(&sample.lv_mask),
        fan_mask: sample.fan_mask.as_ref().map(flip_mask),
    }
}

/// One concrete similarity transform about the image centre.
/// Translation is in pixels; positive angles rotate counter-clockwise on screen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineDraw {
    pub angle_deg: f64,
    pub tx: f64,
    pub ty: f64,
    pub scale: f64,
}

impl AffineDraw {
    pub fn is_identity(&self) -> bool {
        self.angle_deg == 0.0 && self.tx == 0.0 && self.ty == 0.0 && self.scale == 1.0
    }
}

pub fn draw_affine(p: &AffineParams, w: usize, h: usize, rng: &mut RngStream) -> AffineDraw {
    let angle_deg = rng.range(p.rotate.lo(), p.rotate.hi());
    let tx = rng.range(p.translate.lo(), p.translate.hi()) * w as f64;
    let ty = rng.range(p.translate.lo(), p.translate.hi()) * h as f64;
    let scale = rng.range(p.scale.lo(), p.scale.hi());
    AffineDraw { angle_deg, tx, ty, scale }
}

pub fn draw_shift_scale_rotate(p: &ShiftScaleRotateParams, w: usize, h: usize, rng: &mut RngStream) -> AffineDraw {
    let angle_deg = rng.range(-p.rotate_limit, p.rotate_limit);
    let scale = 1.0 + rng.range(-p.scale_limit, p.scale_limit);
    let tx = rng.range(-p.shift_limit, p.shift_limit) * w as f64;
    let ty = rng.range(-p.shift_limit, p.shift_limit) * h as f64;
    AffineDraw { angle_deg, tx, ty, scale }
}

pub fn affine_coord_map(w: usize, h: usize, d: &AffineDraw) -> CoordMap {
    let (cx, cy) = center(w, h);
    let (sin, cos) = sin_cos_deg(d.angle_deg);
    let inv_s = 1.0 / d.scale;
    CoordMap::from_fn(w, h, |x, y| {
        let u = x - cx - d.tx;
        let v = y - cy - d.ty;
        ((cos * u - sin * v) * inv_s + cx, (sin * u + cos * v) * inv_s + cy)
    })
}

pub fn apply_affine_draw(sample: &Sample, d: &AffineDraw, opts: &WarpOptions) -> Sample {
    if d.is_identity() {
        return sample.clone();
    }
    let (w, h) = sample.dims();
    imgops::warp_sample(sample, &affine_coord_map(w, h, d), opts)
}

fn zero_fill(opts: &ApplyOptions) -> WarpOptions {
    WarpOptions {
        image_interp: opts.image_interp.unwrap_or(Interp::Linear),
        border: Border::Constant,
        image_fill: 0.0,
    }
}

pub fn affine(sample: &Sample, p: &AffineParams, rng: &mut RngStream, opts: &ApplyOptions) -> Sample {
    let (w, h) = sample.dims();
    let d = draw_affine(p, w, h, rng);
    apply_affine_draw(sample, &d, &zero_fill(opts))
}

pub fn shift_scale_rotate(sample: &Sample, p: &ShiftScaleRotateParams, rng: &mut RngStream, opts: &ApplyOptions) -> Sample {
    let (w, h) = sample.dims();
    let d = draw_shift_scale_rotate(p, w, h, rng);
    apply_affine_draw(sample, &d, &zero_fill(opts))
}

/// Row-major 3x3 projective matrix.
pub type Homography = [f64; 9];

pub fn apply_homography(m: &Homography, x: f64, y: f64) -> (f64, f64) {
    let z = m[6] * x + m[7] * y + m[8];
    ((m[0] * x + m[1] * y + m[2]) / z, (m[3] * x + m[4] * y + m[5]) / z)
}

/// Solves for the homography taking each `src[i]` to `dst[i]` (with `h33 = 1`).
/// Returns `None` when the point configuration is degenerate.
pub fn homography_from_points(src: &[(f64, f64); 4], dst: &[(f64, f64); 4]) -> Option<Homography> {
    let mut a = [[0.0f64; 9]; 8];
    for i in 0..4 {
        let (x, y) = src[i];
        let (u, v) = dst[i];
        a[2 * i] = [x, y, 1.0, 0.0, 0.0, 0.0, -u * x, -u * y, u];
        a[2 * i + 1] = [0.0, 0.0, 0.0, x, y, 1.0, -v * x, -v * y, v];
    }
    // Gaussian elimination with partial pivoting on the augmented 8x9 system.
    for col in 0..8 {
        let pivot = (col..8).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        for row in 0..8 {
            if row != col {
                let f = a[row][col] / a[col][col];
                if f != 0.0 {
                    for k in col..9 {
                        a[row][k] -= f * a[col][k];
                    }
                }
            }
        }
    }
    let mut m = [0.0; 9];
    for i in 0..8 {
        m[i] = a[i][8] / a[i][i];
    }
    m[8] = 1.0;
    m.iter().all(|v| v.is_finite()).then_some(m)
}

fn image_corners(w: usize, h: usize) -> [(f64, f64); 4] {
    let (xr, yb) = (w as f64 - 1.0, h as f64 - 1.0);
    [(0.0, 0.0), (xr, 0.0), (xr, yb), (0.0, yb)]
}

fn is_convex(q: &[(f64, f64); 4]) -> bool {
    let mut sign = 0.0;
    for i in 0..4 {
        let (a, b, c) = (q[i], q[(i + 1) % 4], q[(i + 2) % 4]);
        let cross = (b.0 - a.0) * (c.1 - b.1) - (b.1 - a.1) * (c.0 - b.0);
        if cross.abs() < 1e-9 || (sign != 0.0 && cross.signum() != sign) {
            return false;
        }
        sign = cross.signum();
    }
    true
}

/// Corner positions of the source quadrilateral: each image corner moved
/// inwards by `|N(0, s)|` of the side length, `s` drawn from the preset range.
pub fn draw_perspective_corners(w: usize, h: usize, p: &PerspectiveParams, rng: &mut RngStream) -> [(f64, f64); 4] {
    let s = rng.range(p.scale.lo(), p.scale.hi());
    let signs = [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)];
    let mut q = image_corners(w, h);
    for (c, (sx, sy)) in q.iter_mut().zip(signs) {
        c.0 += sx * (rng.normal() * s).abs() * w as f64;
        c.1 += sy * (rng.normal() * s).abs() * h as f64;
    }
    q
}

/// Backward map sending the output frame onto the quadrilateral `quad`.
pub fn perspective_homography(w: usize, h: usize, quad: &[(f64, f64); 4]) -> Option<Homography> {
    homography_from_points(&image_corners(w, h), quad)
}

pub fn perspective(sample: &Sample, p: &PerspectiveParams, rng: &mut RngStream, opts: &ApplyOptions) -> Sample {
    let (w, h) = sample.dims();
    let corners = image_corners(w, h);
    for _ in 0..MAX_PERSPECTIVE_ATTEMPTS {
        let quad = draw_perspective_corners(w, h, p, rng);
        if quad == corners {
            return sample.clone();
        }
        if !is_convex(&quad) {
            continue;
        }
        if let Some(m) = perspective_homography(w, h, &quad) {
            let map = CoordMap::from_fn(w, h, |x, y| apply_homography(&m, x, y));
            return imgops::warp_sample(sample, &map, &zero_fill(opts));
        }
    }
    sample.clone()
}

/// 2x3 affine matrix taking three points onto three others.
fn affine_from_triangles(src: &[(f64, f64); 3], dst: &[(f64, f64); 3]) -> Option<[f64; 6]> {
    let (x0, y0) = src[0];
    let (x1, y1) = src[1];
    let (x2, y2) = src[2];
    let det = x0 * (y1 - y2) - y0 * (x1 - x2) + (x1 * y2 - x2 * y1);
    if det.abs() < 1e-12 {
        return None;
    }
    // Inverse of [[x0 y0 1] [x1 y1 1] [x2 y2 1]] by cofactors.
    let inv = [
        [(y1 - y2) / det, (y2 - y0) / det, (y0 - y1) / det],
        [(x2 - x1) / det, (x0 - x2) / det, (x1 - x0) / det],
        [(x1 * y2 - x2 * y1) / det, (x2 * y0 - x0 * y2) / det, (x0 * y1 - x1 * y0) / det],
    ];
    let solve = |t: [f64; 3]| -> [f64; 3] {
        [
            inv[0][0] * t[0] + inv[0][1] * t[1] + inv[0][2] * t[2],
            inv[1][0] * t[0] + inv[1][1] * t[1] + inv[1][2] * t[2],
            inv[2][0] * t[0] + inv[2][1] * t[1] + inv[2][2] * t[2],
        ]
    };
    let a = solve([dst[0].0, dst[1].0, dst[2].0]);
    let b = solve([dst[0].1, dst[1].1, dst[2].1]);
    Some([a[0], a[1], a[2], b[0], b[1], b[2]])
}

fn invert_affine(m: &[f64; 6]) -> Option<[f64; 6]> {
    let det = m[0] * m[4] - m[1] * m[3];
    if det.abs() < 1e-12 {
        return None;
    }
    let (a, b, c, d) = (m[4] / det, -m[1] / det, -m[3] / det, m[0] / det);
    Some([a, b, -(a * m[2] + b * m[5]), c, d, -(c * m[2] + d * m[5])])
}

/// Smoothed random displacement field `alpha * G_sigma * U(-1, 1)` for each axis.
pub fn elastic_displacement(w: usize, h: usize, alpha: f64, sigma: f64, rng: &mut RngStream) -> (Vec<f64>, Vec<f64>) {
    let mut field = || {
        let raw: Vec<f64> = (0..w * h).map(|_| rng.range(-1.0, 1.0)).collect();
        let mut smooth = imgops::gaussian_smooth(&raw, w, h, sigma);
        smooth.iter_mut().for_each(|v| *v *= alpha);
        smooth
    };
    let dx = field();
    let dy = field();
    (dx, dy)
}

pub fn elastic_transform(sample: &Sample, p: &ElasticParams, rng: &mut RngStream, opts: &ApplyOptions) -> Sample {
    if p.alpha == 0.0 && p.alpha_affine == 0.0 {
        return sample.clone();
    }
    let (w, h) = sample.dims();

    let mut inverse = None;
    if p.alpha_affine > 0.0 {
        let square = (w.min(h) / 3) as f64;
        let (cx, cy) = ((w / 2) as f64, (h / 2) as f64);
        let src = [(cx + square, cy + square), (cx + square, cy - square), (cx - square, cy - square)];
        let mut dst = src;
        for pt in dst.iter_mut() {
            pt.0 += rng.range(-p.alpha_affine, p.alpha_affine);
            pt.1 += rng.range(-p.alpha_affine, p.alpha_affine);
        }
        inverse = affine_from_triangles(&src, &dst).and_then(|m| invert_affine(&m));
    }

    let (dx, dy) = if p.alpha > 0.0 {
        elastic_displacement(w, h, p.alpha, p.sigma, rng)
    } else {
        (vec![0.0; w * h], vec![0.0; w * h])
    };

    let map = CoordMap::from_fn(w, h, |x, y| {
        let i = y as usize * w + x as usize;
        let (qx, qy) = (x + dx[i], y + dy[i]);
        match &inverse {
            Some(m) => (m[0] * qx + m[1] * qy + m[2], m[3] * qx + m[4] * qy + m[5]),
            None => (qx, qy),
        }
    });
    let warp = WarpOptions {
        image_interp: opts.image_interp.unwrap_or(Interp::Linear),
        border: Border::Reflect101,
        image_fill: 0.0,
    };
    imgops::warp_sample(sample, &map, &warp)
}

/// Source coordinate for every output index along one axis.
///
/// The axis is split into cells of `n / num_steps` pixels (the remainder forms
/// a final short cell). Cell `k` is stretched by `factors[k]`; output position
/// `x` inside cell `k` reads from `B_k + (x - start_k) * factors[k]`, where
/// `B_k` is the cumulative stretched length of the preceding cells. With
/// `normalized`, factors are rescaled so the stretched cells span exactly `n`.
pub fn grid_axis_coords(n: usize, num_steps: usize, factors: &[f64], normalized: bool) -> Vec<f64> {
    assert!(!factors.is_empty());
    let step = (n / num_steps.max(1)).max(1);
    let cells: Vec<(usize, usize, f64)> = (0..n)
        .step_by(step)
        .enumerate()
        .map(|(k, start)| (start, step.min(n - start), factors[k.min(factors.len() - 1)]))
        .collect();
    let scale = if normalized {
        let stretched: f64 = cells.iter().map(|&(_, len, f)| len as f64 * f).sum();
        n as f64 / stretched
    } else {
        1.0
    };
    let mut coords = Vec::with_capacity(n);
    let mut base = 0.0;
    for &(start, len, f) in &cells {
        let f = f * scale;
        for i in 0..len {
            coords.push(base + i as f64 * f);
        }
        debug_assert_eq!(coords.len(), start + len);
        base += len as f64 * f;
    }
    coords
}

pub fn grid_distortion(sample: &Sample, p: &GridDistortionParams, rng: &mut RngStream, opts: &ApplyOptions) -> Sample {
    let (w, h) = sample.dims();
    let n = p.num_steps as usize + 1;
    let (lo, hi) = (p.distort_limit.lo(), p.distort_limit.hi());
    let xf: Vec<f64> = (0..n).map(|_| 1.0 + rng.range(lo, hi)).collect();
    let yf: Vec<f64> = (0..n).map(|_| 1.0 + rng.range(lo, hi)).collect();
    if xf.iter().chain(&yf).all(|&f| f == 1.0) {
        return sample.clone();
    }
    let xs = grid_axis_coords(w, p.num_steps as usize, &xf, p.normalized);
    let ys = grid_axis_coords(h, p.num_steps as usize, &yf, p.normalized);
    let map = CoordMap::from_fn(w, h, |x, y| (xs[x as usize], ys[y as usize]));
    let warp = WarpOptions {
        image_interp: opts.image_interp.unwrap_or(p.interpolation),
        border: p.border,
        image_fill: 0.0,
    };
    imgops::warp_sample(sample, &map, &warp)
}

/// A crop rectangle and whether it came from the fallback path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CropDraw {
    pub rect: Rect,
    pub fallback: bool,
}

/// Draws an area/aspect-constrained rectangle. Rectangles whose rounded
/// area fraction or aspect ratio falls outside the ranges are rejected;
/// after ten rejections a centred square at the mean scale is used.
pub fn draw_crop_rect(w: usize, h: usize, p: &ResizedCropParams, rng: &mut RngStream) -> CropDraw {
    let area = (w * h) as f64;
    let (log_lo, log_hi) = (p.ratio.lo().ln(), p.ratio.hi().ln());
    for _ in 0..MAX_RECT_ATTEMPTS {
        let target = area * rng.range(p.scale.lo(), p.scale.hi());
        let aspect = rng.range(log_lo, log_hi).exp();
        let cw = (target * aspect).sqrt().round() as usize;
        let ch = (target / aspect).sqrt().round() as usize;
        if cw == 0 || ch == 0 || cw > w || ch > h {
            continue;
        }
        let frac = (cw * ch) as f64 / area;
        let ratio = cw as f64 / ch as f64;
        if !p.scale.contains(frac) || !p.ratio.contains(ratio) {
            continue;
        }
        let y = rng.int_range(0, (h - ch) as i64) as usize;
        let x = rng.int_range(0, (w - cw) as i64) as usize;
        return CropDraw { rect: Rect { x, y, w: cw, h: ch }, fallback: false };
    }
    let side = ((area * p.scale.midpoint()).sqrt().round() as usize).clamp(1, w.min(h));
    CropDraw {
        rect: Rect { x: (w - side) / 2, y: (h - side) / 2, w: side, h: side },
        fallback: true,
    }
}

pub fn random_resized_crop(sample: &Sample, p: &ResizedCropParams, rng: &mut RngStream, opts: &ApplyOptions) -> Sample {
    let (w, h) = sample.dims();
    let draw = draw_crop_rect(w, h, p, rng);
    imgops::crop_and_restore(sample, draw.rect, opts.image_interp.unwrap_or(Interp::Linear))
}

fn check_crop(sample: &Sample, p: &CropParams) -> Result<(usize, usize)> {
    let (w, h) = sample.dims();
    let (cw, ch) = (p.width as usize, p.height as usize);
    if cw > w || ch > h {
        return Err(EchoError::validation(format!(
            "crop {cw}x{ch} is larger than the {w}x{h} input"
        )));
    }
    Ok((cw, ch))
}

pub fn center_crop(sample: &Sample, p: &CropParams, opts: &ApplyOptions) -> Result<Sample> {
    let (w, h) = sample.dims();
    let (cw, ch) = check_crop(sample, p)?;
    let rect = Rect { x: (w - cw) / 2, y: (h - ch) / 2, w: cw, h: ch };
    Ok(imgops::crop_and_restore(sample, rect, opts.image_interp.unwrap_or(Interp::Linear)))
}

/// Top-left corners of every `cw x ch` window that contains at least one
/// positive mask pixel, in row-major order. An empty mask admits every window.
pub fn admissible_windows(mask: &BinaryMask, cw: usize, ch: usize) -> Vec<(usize, usize)> {
    let (w, h) = mask.dims();
    let all = || {
        (0..=h - ch)
            .flat_map(|y| (0..=w - cw).map(move |x| (x, y)))
            .collect::<Vec<_>>()
    };
    if mask.is_empty() {
        return all();
    }
    // Summed-area table with a zero border row and column.
    let stride = w + 1;
    let mut sat = vec![0u32; (w + 1) * (h + 1)];
    for y in 0..h {
        let mut row = 0u32;
        for x in 0..w {
            row += u32::from(mask.get(x, y));
            sat[(y + 1) * stride + x + 1] = sat[y * stride + x + 1] + row;
        }
    }
    all()
        .into_iter()
        .filter(|&(x, y)| {
            let s = sat[(y + ch) * stride + x + cw] + sat[y * stride + x]
                - sat[y * stride + x + cw]
                - sat[(y + ch) * stride + x];
            s > 0
        })
        .collect()
}

pub fn crop_non_empty_mask(sample: &Sample, p: &CropParams, rng: &mut RngStream, opts: &ApplyOptions) -> Result<Sample> {
    let (cw, ch) = check_crop(sample, p)?;
    let windows = admissible_windows(&sample.lv_mask, cw, ch);
    let (x, y) = windows[rng.int_range(0, windows.len() as i64 - 1) as usize];
    let rect = Rect { x, y, w: cw, h: ch };
    Ok(imgops::crop_and_restore(sample, rect, opts.image_interp.unwrap_or(Interp::Linear)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn delta_sample(w: usize, h: usize, x: usize, y: usize) -> Sample {
        let mask = BinaryMask::from_fn(w, h, |i, j| i == x && j == y);
        let image = GrayImage::from_clamped(w, h, mask.values().iter().map(|&v| f64::from(v)).collect());
        Sample::new(image, mask, None).unwrap()
    }

    #[test]
    fn flip_mirrors_columns() {
        let img = GrayImage::new(2, 2, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let s = Sample::from_image(img);
        assert_eq!(horizontal_flip(&s).image.pixels(), &[0.2, 0.1, 0.4, 0.3]);
        assert_eq!(horizontal_flip(&horizontal_flip(&s)), s);
    }

    #[test]
    fn quarter_turn_moves_delta() {
        let s = delta_sample(9, 9, 6, 4);
        let d = AffineDraw { angle_deg: 90.0, tx: 0.0, ty: 0.0, scale: 1.0 };
        let out = apply_affine_draw(&s, &d, &WarpOptions::default());
        // Counter-clockwise on screen: right of centre moves up.
        assert!(out.lv_mask.get(4, 2));
        assert_eq!(out.lv_mask.count(), 1);
    }

    #[test]
    fn grid_identity_factors() {
        let c = grid_axis_coords(10, 3, &[1.0; 4], false);
        assert_eq!(c, (0..10).map(|v| v as f64).collect::<Vec<_>>());
        let n = grid_axis_coords(10, 3, &[1.3, 0.8, 1.1, 0.9], true);
        assert!(n.windows(2).all(|p| p[1] > p[0]));
    }

    #[test]
    fn crop_larger_than_input_fails() {
        let s = Sample::from_image(GrayImage::filled(8, 8, 0.5));
        let p = CropParams { height: 9, width: 4 };
        assert!(center_crop(&s, &p, &ApplyOptions::default()).is_err());
    }

    #[test]
    fn homography_of_identity_points() {
        let c = image_corners(5, 5);
        let m = homography_from_points(&c, &c).unwrap();
        let (x, y) = apply_homography(&m, 1.5, 3.0);
        assert!((x - 1.5).abs() < 1e-12 && (y - 3.0).abs() < 1e-12);
    }
}
