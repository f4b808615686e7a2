//! Counter-based random streams.
//!
//! A stream is a pure function of `(seed, sample_index, stage_index)` and a
//! draw counter, so samples can be processed in any order on any number of
//! threads and still produce identical output.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const SEED_SALT: u64 = 0xD1B5_4A32_D192_ED03;
const SAMPLE_SALT: u64 = 0xA24B_AED4_963E_E407;
const STAGE_SALT: u64 = 0x9FB2_1C65_1E98_DF25;
const OUTPUT_SALT: u64 = 0xC2B2_AE3D_27D4_EB4F;

/// SplitMix64 finalizer.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RngStream {
    key: u64,
    out_key: u64,
    counter: u64,
    spare_normal: Option<u64>,
}

impl RngStream {
    pub fn derive(seed: u64, sample_index: u64, stage_index: u64) -> Self {
        let mut k = mix64(seed ^ SEED_SALT);
        k = mix64(k ^ sample_index.wrapping_mul(SAMPLE_SALT));
        k = mix64(k ^ stage_index.wrapping_mul(STAGE_SALT));
        Self {
            key: k,
            out_key: mix64(k ^ OUTPUT_SALT),
            counter: 0,
            spare_normal: None,
        }
    }

    /// Number of 64-bit words consumed so far.
    pub fn position(&self) -> u64 {
        self.counter
    }

    pub fn next_u64(&mut self) -> u64 {
        let c = self.counter;
        self.counter = self.counter.wrapping_add(1);
        mix64(mix64(self.key.wrapping_add(c.wrapping_mul(GOLDEN))) ^ self.out_key)
    }

    /// Uniform in `[0, 1)` with 53 bits of resolution.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`; returns `lo` exactly when the bounds coincide.
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        let u = self.uniform();
        if lo == hi {
            lo
        } else {
            lo + (hi - lo) * u
        }
    }

    /// Uniform integer in the inclusive interval `[lo, hi]`.
    pub fn int_range(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        let span = (hi - lo) as u64 + 1;
        // Lemire's multiply-shift; bias is below 2^-40 for the spans used here.
        let v = ((u128::from(self.next_u64()) * u128::from(span)) >> 64) as u64;
        lo + v as i64
    }

    /// Standard normal via Box-Muller; the second variate is cached.
    pub fn normal(&mut self) -> f64 {
        if let Some(bits) = self.spare_normal.take() {
            return f64::from_bits(bits);
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare_normal = Some((radius * theta.sin()).to_bits());
        radius * theta.cos()
    }

    /// Probability gate. Always consumes exactly one draw.
    pub fn gate(&mut self, p: f64) -> bool {
        self.uniform() < p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_tuple_same_sequence() {
        let mut a = RngStream::derive(7, 0, 0);
        let mut b = RngStream::derive(7, 0, 0);
        for _ in 0..1000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn gate_extremes() {
        let mut s = RngStream::derive(1, 2, 3);
        assert!((0..1000).all(|_| !s.gate(0.0)));
        assert!((0..1000).all(|_| s.gate(1.0)));
    }

    #[test]
    fn int_range_is_inclusive() {
        let mut s = RngStream::derive(3, 0, 0);
        let mut seen = [false; 4];
        for _ in 0..1000 {
            let v = s.int_range(2, 5);
            seen[(v - 2) as usize] = true;
        }
        assert!(seen.iter().all(|&x| x));
    }
}
