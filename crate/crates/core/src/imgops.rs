//! Low-level raster helpers shared by the transforms: border handling,
//! sampling, resizing, and convolution.
//!
//! Coordinates are pixel-centred: pixel `(i, j)` sits at `(i as f64, j as f64)`.

use crate::model::{BinaryMask, Border, GrayImage, Interp, Sample};

/// Maps an out-of-range index into `[0, n)` under the given border rule.
/// Returns `None` for constant borders.
#[inline]
pub fn border_index(i: i64, n: usize, border: Border) -> Option<usize> {
    let n_i = n as i64;
    if (0..n_i).contains(&i) {
        return Some(i as usize);
    }
    match border {
        Border::Constant => None,
        Border::Replicate => Some(i.clamp(0, n_i - 1) as usize),
        Border::Reflect101 => Some(reflect101(i, n)),
    }
}

/// Reflect-101 indexing (`dcb|abcd|cba`).
#[inline]
pub fn reflect101(i: i64, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as i64 - 1);
    let mut m = i.rem_euclid(period);
    if m >= n as i64 {
        m = period - m;
    }
    m as usize
}

#[inline]
fn fetch(px: &[f64], w: usize, h: usize, x: i64, y: i64, border: Border, fill: f64) -> f64 {
    match (border_index(x, w, border), border_index(y, h, border)) {
        (Some(xi), Some(yi)) => px[yi * w + xi],
        _ => fill,
    }
}

/// Bilinear sample at a real-valued source position.
#[inline]
pub fn sample_bilinear(px: &[f64], w: usize, h: usize, x: f64, y: f64, border: Border, fill: f64) -> f64 {
    if !x.is_finite() || !y.is_finite() {
        return fill;
    }
    let x0 = x.floor();
    let y0 = y.floor();
    let fx = x - x0;
    let fy = y - y0;
    let (xi, yi) = (x0 as i64, y0 as i64);
    // Exact grid hits skip the neighbours so identity maps are bit-exact.
    if fx == 0.0 && fy == 0.0 {
        return fetch(px, w, h, xi, yi, border, fill);
    }
    let a = fetch(px, w, h, xi, yi, border, fill);
    let b = fetch(px, w, h, xi + 1, yi, border, fill);
    let c = fetch(px, w, h, xi, yi + 1, border, fill);
    let d = fetch(px, w, h, xi + 1, yi + 1, border, fill);
    let top = a + (b - a) * fx;
    let bottom = c + (d - c) * fx;
    top + (bottom - top) * fy
}

/// Index of the nearest source pixel for a real-valued coordinate.
#[inline]
pub fn nearest_index(v: f64) -> i64 {
    (v + 0.5).floor() as i64
}

#[inline]
fn sample_nearest<T: Copy>(px: &[T], w: usize, h: usize, x: f64, y: f64, border: Border, fill: T) -> T {
    if !x.is_finite() || !y.is_finite() {
        return fill;
    }
    match (
        border_index(nearest_index(x), w, border),
        border_index(nearest_index(y), h, border),
    ) {
        (Some(xi), Some(yi)) => px[yi * w + xi],
        _ => fill,
    }
}

/// How a backward map is applied to a sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WarpOptions {
    pub image_interp: Interp,
    pub border: Border,
    pub image_fill: f64,
}

impl Default for WarpOptions {
    fn default() -> Self {
        Self {
            image_interp: Interp::Linear,
            border: Border::Constant,
            image_fill: 0.0,
        }
    }
}

/// Source coordinates for every output pixel, row-major.
pub struct CoordMap {
    pub width: usize,
    pub height: usize,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl CoordMap {
    pub fn from_fn(width: usize, height: usize, f: impl Fn(f64, f64) -> (f64, f64)) -> Self {
        let mut xs = Vec::with_capacity(width * height);
        let mut ys = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                let (sx, sy) = f(x as f64, y as f64);
                xs.push(sx);
                ys.push(sy);
            }
        }
        Self { width, height, xs, ys }
    }
}

pub fn remap_image(img: &GrayImage, map: &CoordMap, opts: &WarpOptions) -> GrayImage {
    let (w, h) = img.dims();
    let px = img.pixels();
    let out: Vec<f64> = map
        .xs
        .iter()
        .zip(&map.ys)
        .map(|(&x, &y)| match opts.image_interp {
            Interp::Nearest => sample_nearest(px, w, h, x, y, opts.border, opts.image_fill),
            Interp::Linear | Interp::Area => sample_bilinear(px, w, h, x, y, opts.border, opts.image_fill),
        })
        .collect();
    GrayImage::from_clamped(map.width, map.height, out)
}

pub fn remap_mask(mask: &BinaryMask, map: &CoordMap, border: Border) -> BinaryMask {
    let (w, h) = mask.dims();
    let vals = mask.values();
    let out: Vec<u8> = map
        .xs
        .iter()
        .zip(&map.ys)
        .map(|(&x, &y)| sample_nearest(vals, w, h, x, y, border, 0u8))
        .collect();
    BinaryMask::new(map.width, map.height, out).expect("remapped mask stays binary")
}

/// Applies one backward map to every raster of the sample: images with the
/// requested interpolation, masks with nearest neighbour.
pub fn warp_sample(sample: &Sample, map: &CoordMap, opts: &WarpOptions) -> Sample {
    Sample {
        image: remap_image(&sample.image, map, opts),
        lv_mask: remap_mask(&sample.lv_mask, map, opts.border),
        fan_mask: sample.fan_mask.as_ref().map(|m| remap_mask(m, map, opts.border)),
    }
}

/// Half-pixel-centre source coordinate used by bilinear resizing.
#[inline]
fn resize_coord(dst: usize, scale: f64) -> f64 {
    (dst as f64 + 0.5) * scale - 0.5
}

/// Nearest source index for resizing (`floor(dst * scale)`).
#[inline]
fn resize_nearest_index(dst: usize, scale: f64, n: usize) -> usize {
    ((dst as f64 * scale).floor() as usize).min(n - 1)
}

pub fn resize_image(img: &GrayImage, new_w: usize, new_h: usize, interp: Interp) -> GrayImage {
    let (w, h) = img.dims();
    if (w, h) == (new_w, new_h) {
        return img.clone();
    }
    let sx = w as f64 / new_w as f64;
    let sy = h as f64 / new_h as f64;
    let px = img.pixels();
    let mut out = Vec::with_capacity(new_w * new_h);
    for y in 0..new_h {
        for x in 0..new_w {
            let v = match interp {
                Interp::Nearest => {
                    px[resize_nearest_index(y, sy, h) * w + resize_nearest_index(x, sx, w)]
                }
                Interp::Linear | Interp::Area => {
                    let fx = resize_coord(x, sx).clamp(0.0, (w - 1) as f64);
                    let fy = resize_coord(y, sy).clamp(0.0, (h - 1) as f64);
                    sample_bilinear(px, w, h, fx, fy, Border::Replicate, 0.0)
                }
            };
            out.push(v);
        }
    }
    GrayImage::from_clamped(new_w, new_h, out)
}

pub fn resize_mask(mask: &BinaryMask, new_w: usize, new_h: usize) -> BinaryMask {
    let (w, h) = mask.dims();
    if (w, h) == (new_w, new_h) {
        return mask.clone();
    }
    let sx = w as f64 / new_w as f64;
    let sy = h as f64 / new_h as f64;
    BinaryMask::from_fn(new_w, new_h, |x, y| {
        mask.get(resize_nearest_index(x, sx, w), resize_nearest_index(y, sy, h))
    })
}

pub fn resize_sample(sample: &Sample, new_w: usize, new_h: usize, image_interp: Interp) -> Sample {
    Sample {
        image: resize_image(&sample.image, new_w, new_h, image_interp),
        lv_mask: resize_mask(&sample.lv_mask, new_w, new_h),
        fan_mask: sample.fan_mask.as_ref().map(|m| resize_mask(m, new_w, new_h)),
    }
}

/// Axis-aligned window `[x, x + w) x [y, y + h)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl Rect {
    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x && x < self.x + self.w && y >= self.y && y < self.y + self.h
    }

    pub fn area(&self) -> usize {
        self.w * self.h
    }
}

pub fn crop_image(img: &GrayImage, r: Rect) -> GrayImage {
    let mut out = Vec::with_capacity(r.area());
    for y in r.y..r.y + r.h {
        for x in r.x..r.x + r.w {
            out.push(img.get(x, y));
        }
    }
    GrayImage::from_clamped(r.w, r.h, out)
}

pub fn crop_mask(mask: &BinaryMask, r: Rect) -> BinaryMask {
    BinaryMask::from_fn(r.w, r.h, |x, y| mask.get(r.x + x, r.y + y))
}

/// Crops every raster to `r`, then resizes back to the original size.
pub fn crop_and_restore(sample: &Sample, r: Rect, image_interp: Interp) -> Sample {
    let (w, h) = sample.dims();
    if r == (Rect { x: 0, y: 0, w, h }) {
        return sample.clone();
    }
    let cropped = Sample {
        image: crop_image(&sample.image, r),
        lv_mask: crop_mask(&sample.lv_mask, r),
        fan_mask: sample.fan_mask.as_ref().map(|m| crop_mask(m, r)),
    };
    resize_sample(&cropped, w, h, image_interp)
}

/// OpenCV's default sigma for a Gaussian kernel of size `ksize`.
pub fn auto_sigma(ksize: usize) -> f64 {
    0.3 * ((ksize as f64 - 1.0) * 0.5 - 1.0) + 0.8
}

/// Normalized 1-D Gaussian kernel. `sigma <= 0` selects [`auto_sigma`].
pub fn gaussian_kernel(ksize: usize, sigma: f64) -> Vec<f64> {
    assert!(ksize % 2 == 1, "kernel size must be odd");
    let sigma = if sigma > 0.0 { sigma } else { auto_sigma(ksize) };
    let half = (ksize / 2) as f64;
    let raw: Vec<f64> = (0..ksize)
        .map(|i| {
            let d = i as f64 - half;
            (-(d * d) / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / sum).collect()
}

/// Separable convolution with reflect-101 borders.
pub fn convolve_separable(px: &[f64], w: usize, h: usize, kx: &[f64], ky: &[f64]) -> Vec<f64> {
    let rx = (kx.len() / 2) as i64;
    let ry = (ky.len() / 2) as i64;
    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        let row = &px[y * w..(y + 1) * w];
        for x in 0..w {
            let mut acc = 0.0;
            for (k, &c) in kx.iter().enumerate() {
                acc += c * row[reflect101(x as i64 + k as i64 - rx, w)];
            }
            tmp[y * w + x] = acc;
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for (k, &c) in ky.iter().enumerate() {
            let sy = reflect101(y as i64 + k as i64 - ry, h);
            let src = &tmp[sy * w..(sy + 1) * w];
            let dst = &mut out[y * w..(y + 1) * w];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += c * s;
            }
        }
    }
    out
}

/// Dense 2-D correlation (kernel not flipped) with reflect-101 borders.
pub fn convolve2d(px: &[f64], w: usize, h: usize, kernel: &[f64], kw: usize, kh: usize) -> Vec<f64> {
    assert_eq!(kernel.len(), kw * kh);
    let rx = (kw / 2) as i64;
    let ry = (kh / 2) as i64;
    let taps: Vec<(i64, i64, f64)> = (0..kh)
        .flat_map(|j| (0..kw).map(move |i| (i, j)))
        .map(|(i, j)| (i as i64 - rx, j as i64 - ry, kernel[j * kw + i]))
        .filter(|t| t.2 != 0.0)
        .collect();
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for &(dx, dy, c) in &taps {
                let sx = reflect101(x as i64 + dx, w);
                let sy = reflect101(y as i64 + dy, h);
                acc += c * px[sy * w + sx];
            }
            out[y * w + x] = acc;
        }
    }
    out
}

pub fn gaussian_blur(px: &[f64], w: usize, h: usize, ksize: usize, sigma: f64) -> Vec<f64> {
    if ksize <= 1 {
        return px.to_vec();
    }
    let k = gaussian_kernel(ksize, sigma);
    convolve_separable(px, w, h, &k, &k)
}

/// Gaussian smoothing with a kernel truncated at three standard deviations.
pub fn gaussian_smooth(px: &[f64], w: usize, h: usize, sigma: f64) -> Vec<f64> {
    if sigma <= 0.0 {
        return px.to_vec();
    }
    let radius = (3.0 * sigma).ceil() as usize;
    gaussian_blur(px, w, h, 2 * radius + 1, sigma)
}
