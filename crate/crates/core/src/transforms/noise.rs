use super::photometric::draw_odd_size;
use crate::error::{EchoError, Result};
use crate::imgops;
use crate::model::*;
use crate::rng::RngStream;

fn per_pixel(img: &GrayImage, mut f: impl FnMut(f64) -> f64) -> GrayImage {
    let (w, h) = img.dims();
    GrayImage::from_clamped(w, h, img.pixels().iter().map(|&x| f(x)).collect())
}

pub fn gauss_noise(img: &GrayImage, p: &GaussNoiseParams, rng: &mut RngStream) -> GrayImage {
    let variance = rng.range(p.variance.lo(), p.variance.hi());
    if variance == 0.0 {
        return img.clone();
    }
    let sigma = variance.sqrt();
    per_pixel(img, |x| x + sigma * rng.normal())
}

pub fn multiplicative_noise(img: &GrayImage, p: &MultiplicativeNoiseParams, rng: &mut RngStream) -> GrayImage {
    let (lo, hi) = (p.multiplier.lo(), p.multiplier.hi());
    if lo == 1.0 && hi == 1.0 {
        return img.clone();
    }
    per_pixel(img, |x| x * rng.range(lo, hi))
}

/// Each candidate pixel is hit with probability `amount`; a hit becomes salt
/// (1) with probability `ratio`, otherwise pepper (0).
pub fn salt_and_pepper_with(
    img: &GrayImage,
    region: Option<&BinaryMask>,
    amount: f64,
    ratio: f64,
    rng: &mut RngStream,
) -> GrayImage {
    if amount == 0.0 {
        return img.clone();
    }
    let mut px = img.pixels().to_vec();
    for (i, v) in px.iter_mut().enumerate() {
        if region.is_some_and(|m| m.values()[i] == 0) {
            continue;
        }
        if rng.uniform() < amount {
            *v = if rng.uniform() < ratio { 1.0 } else { 0.0 };
        }
    }
    let (w, h) = img.dims();
    GrayImage::from_clamped(w, h, px)
}

pub fn salt_and_pepper(sample: &Sample, p: &SaltPepperParams, rng: &mut RngStream) -> GrayImage {
    let amount = rng.range(p.amount.lo(), p.amount.hi());
    let ratio = rng.range(p.ratio.lo(), p.ratio.hi());
    let region = p.within_mask.then_some(&sample.lv_mask);
    salt_and_pepper_with(&sample.image, region, amount, ratio, rng)
}

pub fn gaussian_blur(img: &GrayImage, p: &GaussianBlurParams, rng: &mut RngStream) -> GrayImage {
    let ksize = draw_odd_size(p.blur_limit, rng);
    let sigma = p.sigma.map_or(0.0, |s| rng.range(s.lo(), s.hi()));
    if ksize <= 1 {
        return img.clone();
    }
    let (w, h) = img.dims();
    GrayImage::from_clamped(w, h, imgops::gaussian_blur(img.pixels(), w, h, ksize, sigma))
}

/// Normalized `ksize x ksize` line kernel through the centre at `angle`
/// radians (0 is horizontal).
pub fn motion_kernel(ksize: usize, angle: f64) -> Vec<f64> {
    let mut k = vec![0.0; ksize * ksize];
    let c = (ksize / 2) as f64;
    let (sin, cos) = angle.sin_cos();
    let steps = 4 * ksize;
    for i in 0..=steps {
        let t = -c + 2.0 * c * i as f64 / steps as f64;
        let x = imgops::nearest_index(c + t * cos).clamp(0, ksize as i64 - 1) as usize;
        let y = imgops::nearest_index(c + t * sin).clamp(0, ksize as i64 - 1) as usize;
        k[y * ksize + x] = 1.0;
    }
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    k
}

pub fn motion_blur(img: &GrayImage, p: &MotionBlurParams, rng: &mut RngStream) -> GrayImage {
    let ksize = draw_odd_size(p.blur_limit, rng);
    let angle = rng.range(0.0, std::f64::consts::PI);
    if ksize <= 1 {
        return img.clone();
    }
    let (w, h) = img.dims();
    let kernel = motion_kernel(ksize, angle);
    GrayImage::from_clamped(w, h, imgops::convolve2d(img.pixels(), w, h, &kernel, ksize, ksize))
}

pub fn downscale_with(img: &GrayImage, scale: f64, down: Interp, up: Interp) -> GrayImage {
    if scale >= 1.0 {
        return img.clone();
    }
    let (w, h) = img.dims();
    let dw = ((w as f64 * scale) as usize).max(1);
    let dh = ((h as f64 * scale) as usize).max(1);
    let small = imgops::resize_image(img, dw, dh, down);
    imgops::resize_image(&small, w, h, up)
}

pub fn downscale(img: &GrayImage, p: &DownscaleParams, rng: &mut RngStream) -> GrayImage {
    let scale = rng.range(p.scale.lo(), p.scale.hi());
    downscale_with(img, scale, p.downscale, p.upscale)
}

const JPEG_LUMA: [u16; 64] = [
    16, 11, 10, 16, 24, 40, 51, 61, 12, 12, 14, 19, 26, 58, 60, 55, 14, 13, 16, 24, 40, 57, 69, 56, 14, 17, 22, 29, 51,
    87, 80, 62, 18, 22, 37, 56, 68, 109, 103, 77, 24, 35, 55, 64, 81, 104, 113, 92, 49, 64, 78, 87, 103, 121, 120, 101,
    72, 92, 95, 98, 112, 100, 103, 99,
];

/// Luma quantization table scaled for `quality` (1-100) with the IJG curve.
pub fn quant_table(quality: u32) -> [f64; 64] {
    let q = quality.clamp(1, 100);
    let scale = if q < 50 { 5000 / q } else { 200 - 2 * q };
    let mut t = [0.0; 64];
    for (dst, &base) in t.iter_mut().zip(JPEG_LUMA.iter()) {
        *dst = ((u32::from(base) * scale + 50) / 100).clamp(1, 255) as f64;
    }
    t
}

fn dct_matrix() -> [[f64; 8]; 8] {
    let mut m = [[0.0; 8]; 8];
    for (k, row) in m.iter_mut().enumerate() {
        let a = if k == 0 { (1.0f64 / 8.0).sqrt() } else { (2.0f64 / 8.0).sqrt() };
        for (n, v) in row.iter_mut().enumerate() {
            *v = a * (std::f64::consts::PI * (2 * n + 1) as f64 * k as f64 / 16.0).cos();
        }
    }
    m
}

/// 8x8 block-DCT encode/decode round trip on the 8-bit levels of the image.
/// Partial edge blocks are padded by replicating the last row/column.
pub fn jpeg_round_trip(img: &GrayImage, quality: u32) -> GrayImage {
    let (w, h) = img.dims();
    let levels = img.to_u8();
    let table = quant_table(quality);
    let d = dct_matrix();
    let mut out = vec![0.0; w * h];
    let mut block = [[0.0f64; 8]; 8];
    let mut tmp = [[0.0f64; 8]; 8];
    for by in (0..h).step_by(8) {
        for bx in (0..w).step_by(8) {
            for (y, row) in block.iter_mut().enumerate() {
                for (x, v) in row.iter_mut().enumerate() {
                    let sx = (bx + x).min(w - 1);
                    let sy = (by + y).min(h - 1);
                    *v = f64::from(levels[sy * w + sx]) - 128.0;
                }
            }
            // Forward: D * B * D^T, then quantize.
            for u in 0..8 {
                for x in 0..8 {
                    tmp[u][x] = (0..8).map(|y| d[u][y] * block[y][x]).sum();
                }
            }
            for u in 0..8 {
                for v in 0..8 {
                    let coef: f64 = (0..8).map(|x| tmp[u][x] * d[v][x]).sum();
                    let q = table[u * 8 + v];
                    block[u][v] = (coef / q).round() * q;
                }
            }
            // Inverse: D^T * C * D.
            for y in 0..8 {
                for v in 0..8 {
                    tmp[y][v] = (0..8).map(|u| d[u][y] * block[u][v]).sum();
                }
            }
            for y in 0..8 {
                for x in 0..8 {
                    let (ox, oy) = (bx + x, by + y);
                    if ox < w && oy < h {
                        let val: f64 = (0..8).map(|v| tmp[y][v] * d[v][x]).sum();
                        out[oy * w + ox] = (val + 128.0).round().clamp(0.0, 255.0) / 255.0;
                    }
                }
            }
        }
    }
    GrayImage::from_clamped(w, h, out)
}

pub fn image_compression(img: &GrayImage, p: &CompressionParams, rng: &mut RngStream) -> GrayImage {
    let q = rng.int_range(i64::from(p.quality.0), i64::from(p.quality.1)) as u32;
    jpeg_round_trip(img, q)
}

/// Bilateral filter evaluated only at pixels inside `region`; neighbours are
/// taken from the whole image with reflect-101 borders.
pub fn bilateral_in_region(
    img: &GrayImage,
    region: &BinaryMask,
    sigma_spatial: f64,
    sigma_color: f64,
    window_size: usize,
) -> GrayImage {
    let (w, h) = img.dims();
    let r = (window_size / 2) as i64;
    let px = img.pixels();
    let spatial: Vec<(i64, i64, f64)> = (-r..=r)
        .flat_map(|dy| (-r..=r).map(move |dx| (dx, dy)))
        .map(|(dx, dy)| {
            let d2 = (dx * dx + dy * dy) as f64;
            (dx, dy, (-d2 / (2.0 * sigma_spatial * sigma_spatial)).exp())
        })
        .collect();
    let color_denom = 2.0 * sigma_color * sigma_color;
    let mut out = px.to_vec();
    for y in 0..h {
        for x in 0..w {
            if !region.get(x, y) {
                continue;
            }
            let centre = px[y * w + x];
            let (mut num, mut den) = (0.0, 0.0);
            for &(dx, dy, ws) in &spatial {
                let sx = imgops::reflect101(x as i64 + dx, w);
                let sy = imgops::reflect101(y as i64 + dy, h);
                let v = px[sy * w + sx];
                let diff = v - centre;
                let wgt = ws * (-(diff * diff) / color_denom).exp();
                num += wgt * v;
                den += wgt;
            }
            out[y * w + x] = num / den;
        }
    }
    GrayImage::from_clamped(w, h, out)
}

pub fn speckle_reduction(sample: &Sample, p: &BilateralParams) -> Result<GrayImage> {
    let fan = sample
        .fan_mask
        .as_ref()
        .ok_or(EchoError::FanMaskRequired { transform: "SpeckleReduction" })?;
    if p.window_size <= 1 {
        return Ok(sample.image.clone());
    }
    Ok(bilateral_in_region(&sample.image, fan, p.sigma_spatial, p.sigma_color, p.window_size as usize))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horizontal_motion_kernel() {
        let k = motion_kernel(3, 0.0);
        assert_eq!(k, vec![0.0, 0.0, 0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn quality_scaling_curve() {
        assert_eq!(quant_table(50)[0], 16.0);
        assert!(quant_table(100).iter().all(|&q| q == 1.0));
        assert_eq!(quant_table(10)[0], 80.0);
    }

    #[test]
    fn jpeg_keeps_constant_constant() {
        let img = GrayImage::filled(12, 10, 0.37);
        let out = jpeg_round_trip(&img, 20);
        let first = out.get(0, 0);
        assert!(out.pixels().iter().all(|&v| v == first));
    }

    #[test]
    fn salt_everything() {
        let img = GrayImage::filled(5, 5, 0.3);
        let mut rng = RngStream::derive(0, 0, 0);
        let out = salt_and_pepper_with(&img, None, 1.0, 1.0, &mut rng);
        assert!(out.pixels().iter().all(|&v| v == 1.0));
    }
}
