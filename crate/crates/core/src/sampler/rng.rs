//! Random streams for the walks.
//!
//! Every walk column owns an independent ChaCha8 stream (stream id `k + 1`)
//! that feeds its direction draws, and one shared stream (id `0`) feeds the
//! step sizes in column order. Redrawing one column's direction therefore
//! never shifts another column's randomness.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const THETA_STREAM: u64 = 0;

/// Stream id used by walk column `k`.
pub fn column_stream_id(k: usize) -> u64 {
    k as u64 + 1
}

/// A ChaCha8 generator positioned at the start of stream `stream`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform on `[0, 1)` with 53 random bits; consumes exactly one `u64`.
#[inline]
pub fn unit_uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[derive(Debug, Clone)]
pub struct WalkStreams {
    seed: u64,
    theta: ChaCha8Rng,
    columns: Vec<ChaCha8Rng>,
}

impl WalkStreams {
    pub fn new(seed: u64, walks: usize) -> Self {
        Self {
            seed,
            theta: stream_rng(seed, THETA_STREAM),
            columns: (0..walks).map(|k| stream_rng(seed, column_stream_id(k))).collect(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn walks(&self) -> usize {
        self.columns.len()
    }

    #[inline]
    pub fn column(&mut self, k: usize) -> &mut ChaCha8Rng {
        &mut self.columns[k]
    }

    #[inline]
    pub fn theta(&mut self) -> &mut ChaCha8Rng {
        &mut self.theta
    }
}
