#![allow(dead_code)]

use std::path::PathBuf;

use echoaug::analysis::{self, Aggregates};
use echoaug::io;
use echoaug::{BinaryMask, GrayImage, LabelPolicy, Metric, PresetKey, Sample};

/// SplitMix64, kept separate from the engine's generator so test inputs
/// do not depend on the code under test.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        Self(seed ^ 0x5DEE_CE66_D1CE_4E5B)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    pub fn between(&mut self, lo: usize, hi: usize) -> usize {
        lo + self.below(hi - lo + 1)
    }
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).expect("fixture readable")
}

/// Aggregates built from the published per-cell means and flags.
pub fn table3() -> Aggregates {
    let entries = io::parse_cell_means_csv(&read_fixture("table3_dice_cells.csv"), Metric::Dice, LabelPolicy::Paper)
        .expect("cell means parse");
    analysis::aggregate_cell_means(&entries, Metric::Dice).expect("fixture aggregates")
}

pub fn key(label: &str) -> PresetKey {
    label.parse().expect("preset label")
}

/// Rows of a small CSV fixture as header-keyed string maps.
pub fn csv_rows(name: &str) -> Vec<std::collections::HashMap<String, String>> {
    let text = read_fixture(name);
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    rdr.records()
        .map(|r| {
            let r = r.unwrap();
            headers.iter().map(String::from).zip(r.iter().map(String::from)).collect()
        })
        .collect()
}

pub fn random_image(rng: &mut TestRng, w: usize, h: usize) -> GrayImage {
    GrayImage::new(w, h, (0..w * h).map(|_| rng.unit()).collect()).unwrap()
}

/// An axis-aligned ellipse blob, occasionally empty.
pub fn random_blob(rng: &mut TestRng, w: usize, h: usize) -> BinaryMask {
    if rng.below(10) == 0 {
        return BinaryMask::zeros(w, h);
    }
    let cx = rng.unit() * w as f64;
    let cy = rng.unit() * h as f64;
    let rx = 1.0 + rng.unit() * w as f64 / 3.0;
    let ry = 1.0 + rng.unit() * h as f64 / 3.0;
    BinaryMask::from_fn(w, h, |x, y| {
        let u = (x as f64 - cx) / rx;
        let v = (y as f64 - cy) / ry;
        u * u + v * v <= 1.0
    })
}

/// Circular sector opening downwards from `apex` with the given half angle (degrees).
pub fn sector(w: usize, h: usize, apex: (f64, f64), half_angle_deg: f64, radius: f64) -> BinaryMask {
    let tan = half_angle_deg.to_radians().tan();
    BinaryMask::from_fn(w, h, |x, y| {
        let dx = x as f64 - apex.0;
        let dy = y as f64 - apex.1;
        dy >= 0.0 && dx.abs() <= dy * tan && dx.hypot(dy) <= radius
    })
}

/// Sector sized to the frame with its apex near the top centre.
pub fn frame_sector(w: usize, h: usize) -> BinaryMask {
    sector(w, h, (w as f64 / 2.0, 1.0), 40.0, h as f64 - 2.0)
}

/// Positive speckle-like intensities inside `fan`, zero outside.
pub fn sector_image(rng: &mut TestRng, fan: &BinaryMask) -> GrayImage {
    let (w, h) = fan.dims();
    let px = (0..w * h)
        .map(|i| if fan.values()[i] != 0 { 0.02 + 0.98 * rng.unit() } else { 0.0 })
        .collect();
    GrayImage::new(w, h, px).unwrap()
}

pub fn random_sample(rng: &mut TestRng, w: usize, h: usize) -> Sample {
    let fan = frame_sector(w, h);
    let image = sector_image(rng, &fan);
    let lv = random_blob(rng, w, h);
    Sample::new(image, lv, Some(fan)).unwrap()
}

pub fn mask_as_image(m: &BinaryMask) -> GrayImage {
    let (w, h) = m.dims();
    GrayImage::new(w, h, m.values().iter().map(|&v| f64::from(v)).collect()).unwrap()
}
