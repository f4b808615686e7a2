//! Morphological extraction of the ultrasound fan sector.
//!
//! threshold (> 0) -> closing -> largest 8-connected component -> hole fill -> opening

use crate::error::{EchoError, Result};
use crate::metrics;
use crate::model::{BinaryMask, GrayImage};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FanMaskConfig {
    pub close_radius: usize,
    pub open_radius: usize,
}

impl Default for FanMaskConfig {
    fn default() -> Self {
        Self { close_radius: 5, open_radius: 3 }
    }
}

fn disk_offsets(radius: usize) -> Vec<(i64, i64)> {
    let r = radius as i64;
    (-r..=r)
        .flat_map(|dy| (-r..=r).map(move |dx| (dx, dy)))
        .filter(|(dx, dy)| dx * dx + dy * dy <= r * r)
        .collect()
}

/// Pixels outside the frame never veto erosion and never feed dilation, so
/// closing and opening leave frame-touching regions intact.
fn morph(m: &BinaryMask, se: &[(i64, i64)], dilate: bool) -> BinaryMask {
    let (w, h) = m.dims();
    BinaryMask::from_fn(w, h, |x, y| {
        let hit = |&(dx, dy): &(i64, i64)| {
            let (sx, sy) = (x as i64 + dx, y as i64 + dy);
            if sx < 0 || sy < 0 || sx >= w as i64 || sy >= h as i64 {
                return None;
            }
            Some(m.get(sx as usize, sy as usize))
        };
        if dilate {
            se.iter().filter_map(hit).any(|v| v)
        } else {
            se.iter().filter_map(hit).all(|v| v)
        }
    })
}

pub fn dilate(m: &BinaryMask, radius: usize) -> BinaryMask {
    morph(m, &disk_offsets(radius), true)
}

pub fn erode(m: &BinaryMask, radius: usize) -> BinaryMask {
    morph(m, &disk_offsets(radius), false)
}

pub fn close(m: &BinaryMask, radius: usize) -> BinaryMask {
    erode(&dilate(m, radius), radius)
}

pub fn open(m: &BinaryMask, radius: usize) -> BinaryMask {
    dilate(&erode(m, radius), radius)
}

const NEIGHBOURS_8: [(i64, i64); 8] = [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)];
const NEIGHBOURS_4: [(i64, i64); 4] = [(0, -1), (-1, 0), (1, 0), (0, 1)];

/// Labels connected components; returns the per-pixel label (0 = background) and component sizes.
fn label(m: &BinaryMask, neighbours: &[(i64, i64)], foreground: bool) -> (Vec<usize>, Vec<usize>) {
    let (w, h) = m.dims();
    let mut labels = vec![0usize; w * h];
    let mut sizes = vec![0usize];
    let mut stack = Vec::new();
    for start in 0..w * h {
        if labels[start] != 0 || (m.values()[start] != 0) != foreground {
            continue;
        }
        let id = sizes.len();
        sizes.push(0);
        labels[start] = id;
        stack.push(start);
        while let Some(i) = stack.pop() {
            sizes[id] += 1;
            let (x, y) = ((i % w) as i64, (i / w) as i64);
            for &(dx, dy) in neighbours {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if labels[j] == 0 && (m.values()[j] != 0) == foreground {
                    labels[j] = id;
                    stack.push(j);
                }
            }
        }
    }
    (labels, sizes)
}

/// Keeps the largest 8-connected foreground component (lowest label on ties).
pub fn largest_component(m: &BinaryMask) -> BinaryMask {
    let (labels, sizes) = label(m, &NEIGHBOURS_8, true);
    let Some(best) = (1..sizes.len()).max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(b.cmp(&a))) else {
        return m.clone();
    };
    let (w, h) = m.dims();
    BinaryMask::from_fn(w, h, |x, y| labels[y * w + x] == best)
}

/// Fills background regions (4-connected) that do not touch the frame.
pub fn fill_holes(m: &BinaryMask) -> BinaryMask {
    let (w, h) = m.dims();
    let (labels, sizes) = label(m, &NEIGHBOURS_4, false);
    let mut touches = vec![false; sizes.len()];
    for y in 0..h {
        for x in 0..w {
            if x == 0 || y == 0 || x == w - 1 || y == h - 1 {
                touches[labels[y * w + x]] = true;
            }
        }
    }
    BinaryMask::from_fn(w, h, |x, y| {
        let l = labels[y * w + x];
        m.get(x, y) || (l != 0 && !touches[l])
    })
}

pub fn extract_fan_mask(image: &GrayImage) -> Result<BinaryMask> {
    extract_fan_mask_with(image, &FanMaskConfig::default())
}

pub fn extract_fan_mask_with(image: &GrayImage, cfg: &FanMaskConfig) -> Result<BinaryMask> {
    let (w, h) = image.dims();
    let thresholded = BinaryMask::from_fn(w, h, |x, y| image.get(x, y) > 0.0);
    if thresholded.is_empty() {
        return Err(EchoError::EmptyMask("image has no nonzero pixels"));
    }
    let closed = close(&thresholded, cfg.close_radius);
    let component = largest_component(&closed);
    let filled = fill_holes(&component);
    let opened = open(&filled, cfg.open_radius);
    // Opening can split a thin bridge; keep the dominant piece.
    let result = largest_component(&opened);
    if result.is_empty() {
        return Err(EchoError::EmptyMask("fan mask vanished after opening"));
    }
    Ok(result)
}

/// Dice agreement between an extracted fan mask and a reference.
pub fn mask_quality(mask: &BinaryMask, reference: &BinaryMask) -> Result<f64> {
    metrics::dice(mask, reference)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_positive_is_full_frame() {
        let img = GrayImage::filled(20, 15, 0.5);
        assert_eq!(extract_fan_mask(&img).unwrap(), BinaryMask::ones(20, 15));
    }

    #[test]
    fn all_zero_is_error() {
        assert!(extract_fan_mask(&GrayImage::filled(8, 8, 0.0)).is_err());
    }

    #[test]
    fn holes_are_filled() {
        let ring = BinaryMask::from_fn(9, 9, |x, y| (1..8).contains(&x) && (1..8).contains(&y) && !(x == 4 && y == 4));
        let filled = fill_holes(&ring);
        assert!(filled.get(4, 4));
        assert!(!filled.get(0, 0));
    }
}
