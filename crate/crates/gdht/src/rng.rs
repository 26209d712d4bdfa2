//! Seedable deterministic random number generator.
//!
//! A SplitMix64 core (64-bit state, one multiply-xor-shift chain per draw)
//! drives everything random in the crate: design and noise sampling, support
//! selection for synthetic coefficients, preferential-attachment choices, and
//! train/test shuffles. Streams depend only on the seed, never on platform
//! RNG state, so replications can derive child seeds as `seed + k` and every
//! artifact is reproducible bit for bit on the machine that produced it.

/// Deterministic generator with 64-bit state.
#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
    spare_normal: Option<f64>,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { state: seed, spare_normal: None }
    }

    /// Next raw 64-bit draw (SplitMix64).
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform draw from `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw from `(0, 1]`, safe as a logarithm argument.
    fn next_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal draw via Box-Muller. Draws come in pairs; the second
    /// member of each pair is cached and returned on the next call.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let u1 = self.next_open01();
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    /// Unbiased uniform draw from `0..bound` by rejection.
    pub fn next_below(&mut self, bound: usize) -> usize {
        assert!(bound > 0, "empty range");
        let bound = bound as u64;
        let zone = u64::MAX - (u64::MAX - bound + 1) % bound;
        loop {
            let x = self.next_u64();
            if x <= zone {
                return (x % bound) as usize;
            }
        }
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.next_below(i + 1);
            xs.swap(i, j);
        }
    }

    /// The first `take` elements of a uniform random permutation of `0..n`,
    /// i.e. a uniform sample of `take` distinct indices, in draw order.
    pub fn sample_distinct(&mut self, n: usize, take: usize) -> Vec<usize> {
        assert!(take <= n, "cannot sample {take} distinct values from 0..{n}");
        let mut idx: Vec<usize> = (0..n).collect();
        for i in 0..take {
            let j = i + self.next_below(n - i);
            idx.swap(i, j);
        }
        idx.truncate(take);
        idx
    }
}
