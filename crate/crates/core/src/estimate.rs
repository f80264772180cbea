//! Chunked Monte-Carlo plumbing.
//!
//! A run of `samples` draws is cut into chunks of [`CHUNK_SIZE`]. Chunk `k`
//! draws from the ChaCha8 stream `k` of the master seed and accumulates its own
//! [`Moments`]; partial moments are merged in chunk order. The result depends
//! only on `(seed, samples)`, never on how chunks were scheduled.

use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::measure::MeasureSpec;

pub const CHUNK_SIZE: u64 = 8192;

/// Executes independent chunk jobs and returns their results in chunk order.
pub trait ChunkRunner {
    fn map_chunks<T, F>(&self, chunks: u64, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send;
}

/// Runs chunks one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl ChunkRunner for Sequential {
    fn map_chunks<T, F>(&self, chunks: u64, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        (0..chunks).map(job).collect()
    }
}

pub fn chunk_count(samples: u64) -> u64 {
    samples.div_ceil(CHUNK_SIZE)
}

pub fn chunk_len(samples: u64, chunk: u64) -> u64 {
    let start = chunk * CHUNK_SIZE;
    CHUNK_SIZE.min(samples.saturating_sub(start))
}

pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// SplitMix64 mix of `(seed, index)`, used to derive independent sub-seeds.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Running mean and sum of squared deviations (Welford, merged with Chan's rule).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let (na, nb, n) = (self.count as f64, other.count as f64, count as f64);
        let delta = other.mean - self.mean;
        Moments {
            count,
            mean: self.mean + delta * nb / n,
            m2: self.m2 + other.m2 + delta * delta * na * nb / n,
        }
    }

    /// Standard error of the mean from the unbiased sample variance.
    pub fn std_error(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        libm::sqrt((self.m2 / (n - 1.0)).max(0.0) / n)
    }
}

/// A Monte-Carlo estimate with its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

impl ScoreEstimate {
    pub fn from_moments(m: &Moments, seed: u64) -> Self {
        Self {
            value: m.mean,
            std_error: m.std_error(),
            samples: m.count,
            seed,
        }
    }

    /// Number of standard errors the value sits above zero.
    pub fn z_score(&self) -> f64 {
        if self.std_error > 0.0 {
            self.value / self.std_error
        } else if self.value > 0.0 {
            f64::INFINITY
        } else if self.value < 0.0 {
            f64::NEG_INFINITY
        } else {
            0.0
        }
    }

    pub fn positive_at(&self, sigmas: f64) -> bool {
        self.value > 0.0 && self.value > sigmas * self.std_error
    }
}

/// Evaluates `K` statistics on one shared stream of draws from `mu`.
pub fn moments_with<R, F, const K: usize>(
    runner: &R,
    mu: &MeasureSpec,
    samples: u64,
    seed: u64,
    statistic: F,
) -> [Moments; K]
where
    R: ChunkRunner + ?Sized,
    F: Fn(&[f64]) -> [f64; K] + Sync + Send,
{
    let partials = runner.map_chunks(chunk_count(samples), |k| {
        let mut rng = chunk_rng(seed, k);
        let mut x = vec![0.0; mu.dim()];
        let mut acc = [Moments::default(); K];
        for _ in 0..chunk_len(samples, k) {
            mu.sample_into(&mut rng, &mut x);
            for (m, v) in acc.iter_mut().zip(statistic(&x)) {
                m.push(v);
            }
        }
        acc
    });
    partials
        .into_iter()
        .fold([Moments::default(); K], |mut total, part| {
            for (t, p) in total.iter_mut().zip(part) {
                *t = t.merge(p);
            }
            total
        })
}

/// Single-statistic convenience over [`moments_with`].
pub fn estimate_with<R, F>(
    runner: &R,
    mu: &MeasureSpec,
    samples: u64,
    seed: u64,
    statistic: F,
) -> ScoreEstimate
where
    R: ChunkRunner + ?Sized,
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    let [m] = moments_with(runner, mu, samples, seed, |x| [statistic(x)]);
    ScoreEstimate::from_moments(&m, seed)
}
