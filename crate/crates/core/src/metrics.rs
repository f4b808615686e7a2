//! Segmentation overlap metrics and intensity statistics.

use crate::error::{EchoError, Result};
use crate::model::{BinaryMask, GrayImage, ImageStatsRecord};

fn overlap(a: &BinaryMask, b: &BinaryMask) -> Result<(usize, usize, usize)> {
    if a.dims() != b.dims() {
        return Err(EchoError::DimensionMismatch { left: a.dims(), right: b.dims() });
    }
    let mut inter = 0;
    let (mut na, mut nb) = (0, 0);
    for (&x, &y) in a.values().iter().zip(b.values()) {
        na += usize::from(x);
        nb += usize::from(y);
        inter += usize::from(x & y);
    }
    Ok((inter, na, nb))
}

/// `2|A ∩ B| / (|A| + |B|)`; two empty masks score 1.
pub fn dice(pred: &BinaryMask, truth: &BinaryMask) -> Result<f64> {
    let (inter, na, nb) = overlap(pred, truth)?;
    if na + nb == 0 {
        return Ok(1.0);
    }
    Ok(2.0 * inter as f64 / (na + nb) as f64)
}

/// `|A ∩ B| / |A ∪ B|`; two empty masks score 1.
pub fn iou(pred: &BinaryMask, truth: &BinaryMask) -> Result<f64> {
    let (inter, na, nb) = overlap(pred, truth)?;
    let union = na + nb - inter;
    if union == 0 {
        return Ok(1.0);
    }
    Ok(inter as f64 / union as f64)
}

/// Percentile with linear interpolation between order statistics
/// (`q` in `[0, 100]`, input sorted ascending).
pub fn percentile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q / 100.0 * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Mean and population standard deviation.
fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn image_stats(image: &GrayImage, lv_mask: Option<&BinaryMask>) -> Result<ImageStatsRecord> {
    if let Some(m) = lv_mask {
        if m.dims() != image.dims() {
            return Err(EchoError::DimensionMismatch { left: image.dims(), right: m.dims() });
        }
    }
    let mut s: Vec<f64> = image.pixels().iter().copied().filter(|&v| v > 0.0).collect();
    if s.is_empty() {
        return Err(EchoError::validation("image has no nonzero pixels"));
    }
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let (mean, std) = mean_std(&s);
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in &s {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let (skewness, kurtosis_excess) = if m2 > 0.0 {
        (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
    } else {
        (0.0, 0.0)
    };

    let (lv_core_brightness, lv_core_contrast) = match lv_mask {
        Some(m) => {
            let core: Vec<f64> = image
                .pixels()
                .iter()
                .zip(m.values())
                .filter(|(&v, &k)| k != 0 && v > 0.0)
                .map(|(&v, _)| v)
                .collect();
            if core.is_empty() {
                (None, None)
            } else {
                let (cm, cs) = mean_std(&core);
                (Some(cm), Some(cs))
            }
        }
        None => (None, None),
    };

    Ok(ImageStatsRecord {
        mean_brightness: mean,
        median_brightness: percentile_sorted(&s, 50.0),
        std_contrast: std,
        robust_contrast_5_95: percentile_sorted(&s, 95.0) - percentile_sorted(&s, 5.0),
        skewness,
        kurtosis_excess,
        dynamic_range: s[s.len() - 1] - s[0],
        lv_core_brightness,
        lv_core_contrast,
    })
}

/// Field-wise mean over records; optional fields average over the records that have them.
pub fn mean_stats(records: &[ImageStatsRecord]) -> Option<ImageStatsRecord> {
    if records.is_empty() {
        return None;
    }
    let n = records.len() as f64;
    let avg = |f: fn(&ImageStatsRecord) -> f64| records.iter().map(f).sum::<f64>() / n;
    let avg_opt = |f: fn(&ImageStatsRecord) -> Option<f64>| {
        let vals: Vec<f64> = records.iter().filter_map(f).collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    };
    Some(ImageStatsRecord {
        mean_brightness: avg(|r| r.mean_brightness),
        median_brightness: avg(|r| r.median_brightness),
        std_contrast: avg(|r| r.std_contrast),
        robust_contrast_5_95: avg(|r| r.robust_contrast_5_95),
        skewness: avg(|r| r.skewness),
        kurtosis_excess: avg(|r| r.kurtosis_excess),
        dynamic_range: avg(|r| r.dynamic_range),
        lv_core_brightness: avg_opt(|r| r.lv_core_brightness),
        lv_core_contrast: avg_opt(|r| r.lv_core_contrast),
    })
}
