//! Deterministic random numbers for dataset generation.
//!
//! Everything that randomizes an instance flows through [`SplitMix64`] so
//! that a `(base, family, seed)` triple regenerates byte-identical files on
//! any platform. The generator is the well-known SplitMix64 sequence: a
//! 64-bit counter advanced by the golden-gamma constant and scrambled by two
//! xor-shift multiplies. It is not cryptographic and does not need to be.

/// SplitMix64 stream. `next_u64` advances the state by `0x9E3779B97F4A7C15`
/// and returns the scrambled counter.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` using the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[lo, hi]` by rejection, unbiased.
    pub fn gen_range_u64(&mut self, lo: u64, hi: u64) -> u64 {
        assert!(lo <= hi, "empty range");
        let span = hi - lo;
        if span == u64::MAX {
            return self.next_u64();
        }
        let buckets = span + 1;
        let limit = u64::MAX - u64::MAX % buckets;
        loop {
            let v = self.next_u64();
            if v < limit {
                return lo + v % buckets;
            }
        }
    }

    pub fn gen_range_i32(&mut self, lo: i32, hi: i32) -> i32 {
        lo + self.gen_range_u64(0, (hi as i64 - lo as i64) as u64) as i32
    }

    /// Normal deviate via the Box-Muller transform (basic form, fresh pair
    /// of uniforms per call, cosine branch).
    pub fn next_normal(&mut self, mean: f64, std_dev: f64) -> f64 {
        let u1 = loop {
            let u = self.next_f64();
            if u > 0.0 {
                break u;
            }
        };
        let u2 = self.next_f64();
        let z = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
        mean + std_dev * z
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.gen_range_u64(0, i as u64) as usize;
            items.swap(i, j);
        }
    }
}

/// Derives an independent stream for run `index` of a batch, so experiment
/// variations don't overlap. Mixes the pair through one scramble round.
pub fn derive_seed(base_seed: u64, index: u64) -> u64 {
    let mut mix = SplitMix64::new(base_seed ^ index.wrapping_mul(0xA076_1D64_78BD_642F));
    mix.next_u64()
}
