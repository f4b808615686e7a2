use crate::imgops::Rect;
use crate::model::*;
use crate::rng::RngStream;

const MAX_ERASE_ATTEMPTS: usize = 10;

fn fill_rect(px: &mut [f64], w: usize, r: Rect, mut value: impl FnMut() -> f64) {
    for y in r.y..r.y + r.h {
        for v in &mut px[y * w + r.x..y * w + r.x + r.w] {
            *v = value();
        }
    }
}

/// Draws the hole rectangles for one application. Hole sides are bounded by
/// `int(fraction * side)` pixels.
pub fn draw_dropout_holes(w: usize, h: usize, p: &CoarseDropoutParams, rng: &mut RngStream) -> Vec<Rect> {
    let count = rng.int_range(i64::from(p.holes.0), i64::from(p.holes.1));
    let bound = |frac: f64, side: usize| ((frac * side as f64) as i64).clamp(0, side as i64);
    let (hmin, hmax) = (bound(p.height.lo(), h), bound(p.height.hi(), h));
    let (wmin, wmax) = (bound(p.width.lo(), w), bound(p.width.hi(), w));
    let mut holes = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let hh = rng.int_range(hmin, hmax.max(hmin)) as usize;
        let ww = rng.int_range(wmin, wmax.max(wmin)) as usize;
        let y = rng.int_range(0, (h - hh) as i64) as usize;
        let x = rng.int_range(0, (w - ww) as i64) as usize;
        if hh > 0 && ww > 0 {
            holes.push(Rect { x, y, w: ww, h: hh });
        }
    }
    holes
}

pub fn coarse_dropout(img: &GrayImage, p: &CoarseDropoutParams, rng: &mut RngStream) -> GrayImage {
    let (w, h) = img.dims();
    let holes = draw_dropout_holes(w, h, p, rng);
    if holes.is_empty() {
        return img.clone();
    }
    let mut px = img.pixels().to_vec();
    for r in holes {
        fill_rect(&mut px, w, r, || p.fill);
    }
    GrayImage::from_clamped(w, h, px)
}

/// Rejection-samples one erase rectangle. `None` after ten failed draws.
/// Draws whose rounded area fraction leaves the scale range are rejected.
pub fn draw_erase_rect(w: usize, h: usize, p: &ErasingParams, rng: &mut RngStream) -> Option<Rect> {
    let area = (w * h) as f64;
    let (log_lo, log_hi) = (p.ratio.lo().ln(), p.ratio.hi().ln());
    for _ in 0..MAX_ERASE_ATTEMPTS {
        let target = area * rng.range(p.scale.lo(), p.scale.hi());
        let aspect = rng.range(log_lo, log_hi).exp();
        let eh = (target * aspect).sqrt().round() as usize;
        let ew = (target / aspect).sqrt().round() as usize;
        if eh == 0 || ew == 0 || eh >= h || ew >= w {
            continue;
        }
        if !p.scale.contains((eh * ew) as f64 / area) {
            continue;
        }
        let y = rng.int_range(0, (h - eh) as i64) as usize;
        let x = rng.int_range(0, (w - ew) as i64) as usize;
        return Some(Rect { x, y, w: ew, h: eh });
    }
    None
}

pub fn erase_rect(img: &GrayImage, r: Rect, fill: EraseFill, rng: &mut RngStream) -> GrayImage {
    let (w, h) = img.dims();
    let mut px = img.pixels().to_vec();
    match fill {
        EraseFill::Constant(v) => fill_rect(&mut px, w, r, || v),
        EraseFill::Random => fill_rect(&mut px, w, r, || rng.uniform()),
    }
    GrayImage::from_clamped(w, h, px)
}

pub fn random_erasing(img: &GrayImage, p: &ErasingParams, rng: &mut RngStream) -> GrayImage {
    if !rng.gate(p.inner_probability) {
        return img.clone();
    }
    let (w, h) = img.dims();
    match draw_erase_rect(w, h, p, rng) {
        Some(r) => erase_rect(img, r, p.fill, rng),
        None => img.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_holes_is_identity() {
        let img = GrayImage::filled(8, 8, 0.7);
        let p = CoarseDropoutParams { holes: IntRange(0, 0), height: Range(0.1, 0.2), width: Range(0.1, 0.2), fill: 0.0 };
        let mut rng = RngStream::derive(1, 0, 0);
        assert_eq!(coarse_dropout(&img, &p, &mut rng), img);
    }

    #[test]
    fn erase_known_rect() {
        let img = GrayImage::filled(6, 6, 0.5);
        let r = Rect { x: 1, y: 2, w: 3, h: 2 };
        let mut rng = RngStream::derive(1, 0, 0);
        let out = erase_rect(&img, r, EraseFill::Constant(0.0), &mut rng);
        for y in 0..6 {
            for x in 0..6 {
                assert_eq!(out.get(x, y), if r.contains(x, y) { 0.0 } else { 0.5 });
            }
        }
    }
}
