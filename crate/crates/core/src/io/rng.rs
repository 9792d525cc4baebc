//! Counter-based random streams.
//!
//! Every draw is a pure function of `(seed, stream_id, index)`:
//!
//! ```text
//! key      = mix64(seed ^ mix64(stream_id + GOLDEN))
//! word(i)  = mix64(key + (i + 1) * GOLDEN)          (wrapping arithmetic)
//! uniform  = (word >> 11) * 2^-53                   in [0, 1)
//! ```
//!
//! where `mix64` is the SplitMix64 finalizer. Samplers built on top consume a
//! fixed number of words per draw where possible so that sequences can be
//! reproduced outside Rust.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One independent stream per consumer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum StreamId {
    Arrivals = 1,
    Service = 2,
    Discharge = 3,
    Acuity = 4,
    TrainShuffle = 5,
    WeightInit = 6,
    SyntheticNoise = 7,
}

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    key: u64,
    index: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: StreamId) -> Self {
        Self::with_raw_id(seed, stream as u64)
    }

    pub fn with_raw_id(seed: u64, stream_id: u64) -> Self {
        let key = mix64(seed ^ mix64(stream_id.wrapping_add(GOLDEN)));
        Self {
            seed,
            stream_id,
            key,
            index: 0,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Number of 64-bit words consumed so far.
    pub fn position(&self) -> u64 {
        self.index
    }

    /// The word at an absolute index, without advancing.
    pub fn word_at(&self, index: u64) -> u64 {
        mix64(self.key.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN)))
    }

    pub fn next_u64(&mut self) -> u64 {
        let w = self.word_at(self.index);
        self.index += 1;
        w
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `0..n` (multiply-shift, one word). `n` must be > 0.
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }

    /// Standard normal via the cosine branch of Box-Muller (two words).
    pub fn standard_normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn normal(&mut self, mean: f64, sd: f64) -> f64 {
        mean + sd * self.standard_normal()
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Poisson by CDF inversion (one word). Large means are split into equal
    /// parts so `exp(-mean)` never underflows.
    pub fn poisson(&mut self, mean: f64) -> u64 {
        const CHUNK: f64 = 500.0;
        if mean <= 0.0 {
            return 0;
        }
        if mean > CHUNK {
            let parts = (mean / CHUNK).ceil() as u64;
            let each = mean / parts as f64;
            return (0..parts).map(|_| self.poisson(each)).sum();
        }
        let u = self.uniform();
        let mut p = (-mean).exp();
        let mut cdf = p;
        let mut k = 0u64;
        // The tail guard stops the walk once p has underflowed.
        while u >= cdf && p > 0.0 {
            k += 1;
            p *= mean / k as f64;
            cdf += p;
        }
        k
    }

    /// Binomial as a sum of `trials` Bernoulli draws.
    pub fn binomial(&mut self, trials: u32, p: f64) -> u32 {
        (0..trials).filter(|_| self.bernoulli(p)).count() as u32
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..n).collect();
        self.shuffle(&mut idx);
        idx
    }
}
