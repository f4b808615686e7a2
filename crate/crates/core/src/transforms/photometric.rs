use crate::imgops;
use crate::model::*;
use crate::rng::RngStream;

/// `clamp((x - 0.5) * (1 + c) + 0.5 + b)`.
pub fn brightness_contrast_with(img: &GrayImage, b: f64, c: f64) -> GrayImage {
    if b == 0.0 && c == 0.0 {
        return img.clone();
    }
    img.map(|x| (x - 0.5) * (1.0 + c) + 0.5 + b)
}

pub fn random_brightness_contrast(img: &GrayImage, p: &BrightnessContrastParams, rng: &mut RngStream) -> GrayImage {
    let b = rng.range(p.brightness.lo(), p.brightness.hi());
    let c = rng.range(p.contrast.lo(), p.contrast.hi());
    brightness_contrast_with(img, b, c)
}

/// `x^(g / 100)` for a gamma given in percent.
pub fn gamma_with(img: &GrayImage, g: f64) -> GrayImage {
    if g == 100.0 {
        return img.clone();
    }
    let e = g / 100.0;
    img.map(|x| x.powf(e))
}

pub fn random_gamma(img: &GrayImage, p: &GammaParams, rng: &mut RngStream) -> GrayImage {
    gamma_with(img, rng.range(p.gamma.lo(), p.gamma.hi()))
}

pub fn color_jitter_with(img: &GrayImage, fb: f64, fc: f64) -> GrayImage {
    if fb == 1.0 && fc == 1.0 {
        return img.clone();
    }
    let bright: Vec<f64> = img.pixels().iter().map(|&x| x * fb).collect();
    let mean = bright.iter().sum::<f64>() / bright.len() as f64;
    let (w, h) = img.dims();
    GrayImage::from_clamped(w, h, bright.into_iter().map(|y| (y - mean) * fc + mean).collect())
}

pub fn color_jitter(img: &GrayImage, p: &ColorJitterParams, rng: &mut RngStream) -> GrayImage {
    let fb = rng.range((1.0 - p.brightness).max(0.0), 1.0 + p.brightness);
    let fc = rng.range((1.0 - p.contrast).max(0.0), 1.0 + p.contrast);
    color_jitter_with(img, fb, fc)
}

pub fn windowing_with(img: &GrayImage, center: f64, width: f64) -> GrayImage {
    let lo = center - width / 2.0;
    img.map(|x| (x - lo) / width)
}

pub fn intensity_windowing(img: &GrayImage, p: &WindowingParams, rng: &mut RngStream) -> GrayImage {
    let center = rng.range(p.center.lo(), p.center.hi());
    let mut width = rng.range(p.width.lo(), p.width.hi());
    while width <= 0.0 {
        width = rng.range(p.width.lo(), p.width.hi());
    }
    windowing_with(img, center, width)
}

/// 3x3 kernel blending the identity with a Laplacian-style sharpening kernel.
pub fn sharpen_kernel(alpha: f64, lightness: f64) -> [f64; 9] {
    let mut k = [-alpha; 9];
    k[4] = (1.0 - alpha) + alpha * (8.0 + lightness);
    k
}

pub fn sharpen_with(img: &GrayImage, alpha: f64, lightness: f64) -> GrayImage {
    if alpha == 0.0 {
        return img.clone();
    }
    let (w, h) = img.dims();
    let out = imgops::convolve2d(img.pixels(), w, h, &sharpen_kernel(alpha, lightness), 3, 3);
    GrayImage::from_clamped(w, h, out)
}

pub fn sharpen(img: &GrayImage, p: &SharpenParams, rng: &mut RngStream) -> GrayImage {
    let alpha = rng.range(p.alpha.lo(), p.alpha.hi());
    let lightness = rng.range(p.lightness.lo(), p.lightness.hi());
    sharpen_with(img, alpha, lightness)
}

/// Odd values in `[lo, hi]`. An interval with no odd member yields `lo + 1`.
pub fn odd_sizes(limit: IntRange) -> Vec<usize> {
    let lo = limit.0.max(1) as usize;
    let hi = (limit.1 as usize).max(lo);
    let v: Vec<usize> = (lo..=hi).filter(|k| k % 2 == 1).collect();
    if v.is_empty() {
        vec![lo + 1]
    } else {
        v
    }
}

pub fn draw_odd_size(limit: IntRange, rng: &mut RngStream) -> usize {
    let choices = odd_sizes(limit);
    choices[rng.int_range(0, choices.len() as i64 - 1) as usize]
}

pub fn unsharp_with(img: &GrayImage, ksize: usize, sigma: f64, alpha: f64, threshold: f64) -> GrayImage {
    if alpha == 0.0 {
        return img.clone();
    }
    let (w, h) = img.dims();
    let blur = imgops::gaussian_blur(img.pixels(), w, h, ksize, sigma);
    let out = img
        .pixels()
        .iter()
        .zip(&blur)
        .map(|(&x, &b)| {
            let residual = x - b;
            if residual.abs() < threshold {
                x
            } else {
                x + alpha * residual
            }
        })
        .collect();
    GrayImage::from_clamped(w, h, out)
}

pub fn unsharp_mask(img: &GrayImage, p: &UnsharpParams, rng: &mut RngStream) -> GrayImage {
    let ksize = draw_odd_size(p.blur_limit, rng);
    let sigma = rng.range(p.sigma.lo(), p.sigma.hi());
    let alpha = rng.range(p.alpha.lo(), p.alpha.hi());
    unsharp_with(img, ksize, sigma, alpha, p.threshold)
}

/// Contrast-limited adaptive histogram equalization on the 8-bit
/// quantization of the image, with bilinear blending between tile mappings.
/// The image is padded (reflect-101) to a multiple of the tile grid.
pub fn clahe(img: &GrayImage, clip_limit: f64, tile_grid: (u32, u32)) -> GrayImage {
    const BINS: usize = 256;
    let (w, h) = img.dims();
    let (tiles_y, tiles_x) = (tile_grid.0.max(1) as usize, tile_grid.1.max(1) as usize);
    let src: Vec<u8> = img.to_u8();

    let tile_w = w.div_ceil(tiles_x);
    let tile_h = h.div_ceil(tiles_y);
    let tile_area = (tile_w * tile_h) as f64;
    let clip = if clip_limit > 0.0 {
        ((clip_limit * tile_area / BINS as f64) as usize).max(1)
    } else {
        usize::MAX
    };
    let lut_scale = (BINS - 1) as f64 / tile_area;

    let padded = |x: usize, y: usize| -> u8 {
        let xi = imgops::reflect101(x as i64, w);
        let yi = imgops::reflect101(y as i64, h);
        src[yi * w + xi]
    };

    let mut luts = vec![[0u8; BINS]; tiles_x * tiles_y];
    for ty in 0..tiles_y {
        for tx in 0..tiles_x {
            let mut hist = [0usize; BINS];
            for y in ty * tile_h..(ty + 1) * tile_h {
                for x in tx * tile_w..(tx + 1) * tile_w {
                    hist[padded(x, y) as usize] += 1;
                }
            }
            if clip != usize::MAX {
                let mut clipped = 0;
                for b in hist.iter_mut() {
                    if *b > clip {
                        clipped += *b - clip;
                        *b = clip;
                    }
                }
                let batch = clipped / BINS;
                let mut residual = clipped - batch * BINS;
                for b in hist.iter_mut() {
                    *b += batch;
                }
                if residual > 0 {
                    let step = (BINS / residual).max(1);
                    let mut i = 0;
                    while i < BINS && residual > 0 {
                        hist[i] += 1;
                        residual -= 1;
                        i += step;
                    }
                }
            }
            let lut = &mut luts[ty * tiles_x + tx];
            let mut sum = 0usize;
            for (i, &count) in hist.iter().enumerate() {
                sum += count;
                lut[i] = (sum as f64 * lut_scale).round().clamp(0.0, 255.0) as u8;
            }
        }
    }

    let inv_tw = 1.0 / tile_w as f64;
    let inv_th = 1.0 / tile_h as f64;
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        let tyf = y as f64 * inv_th - 0.5;
        let ty1 = tyf.floor();
        let ya = tyf - ty1;
        let ty1i = (ty1 as i64).max(0) as usize;
        let ty2i = ((ty1 as i64 + 1) as usize).min(tiles_y - 1);
        for x in 0..w {
            let txf = x as f64 * inv_tw - 0.5;
            let tx1 = txf.floor();
            let xa = txf - tx1;
            let tx1i = (tx1 as i64).max(0) as usize;
            let tx2i = ((tx1 as i64 + 1) as usize).min(tiles_x - 1);
            let v = src[y * w + x] as usize;
            let at = |ty: usize, tx: usize| f64::from(luts[ty * tiles_x + tx][v]);
            let top = at(ty1i, tx1i) * (1.0 - xa) + at(ty1i, tx2i) * xa;
            let bottom = at(ty2i, tx1i) * (1.0 - xa) + at(ty2i, tx2i) * xa;
            let res = (top * (1.0 - ya) + bottom * ya).round().clamp(0.0, 255.0);
            out.push(res / 255.0);
        }
    }
    GrayImage::from_clamped(w, h, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brightness_shift_on_constant() {
        let img = GrayImage::filled(3, 3, 0.5);
        let out = brightness_contrast_with(&img, 0.1, 0.0);
        assert!(out.pixels().iter().all(|&v| (v - 0.6).abs() < 1e-12));
    }

    #[test]
    fn gamma_power_law() {
        let img = GrayImage::filled(2, 2, 0.5);
        assert!((gamma_with(&img, 200.0).get(0, 0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn windowing_ramp() {
        let img = GrayImage::new(3, 1, vec![0.25, 0.5, 0.75]).unwrap();
        assert_eq!(windowing_with(&img, 0.5, 0.5).pixels(), &[0.0, 0.5, 1.0]);
        assert_eq!(windowing_with(&img, 0.5, 1.0), img);
    }

    #[test]
    fn odd_size_choices() {
        assert_eq!(odd_sizes(IntRange(10, 20)), vec![11, 13, 15, 17, 19]);
        assert_eq!(odd_sizes(IntRange(3, 4)), vec![3]);
        assert_eq!(odd_sizes(IntRange(4, 4)), vec![5]);
    }

    #[test]
    fn sharpen_kernel_sum() {
        let s: f64 = sharpen_kernel(0.3, 1.0).iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn clahe_constant_stays_constant() {
        let img = GrayImage::filled(16, 16, 0.4);
        let out = clahe(&img, 2.0, (4, 4));
        let first = out.get(0, 0);
        assert!(out.pixels().iter().all(|&v| v == first));
    }
}
