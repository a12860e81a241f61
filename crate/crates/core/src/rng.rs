//! Reproducible random streams for parallel sampling.
//!
//! Samples are grouped into fixed-size blocks. Block `b` draws from the
//! ChaCha stream `b` of the key derived from the user seed, so the values a
//! block sees depend only on `(seed, b)`: never on how many workers run or
//! which worker picks the block up.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Samples per block. Fixed so block boundaries never depend on the worker count.
pub const BLOCK_SIZE: usize = 4096;

pub type SampleRng = ChaCha8Rng;

pub fn block_rng(seed: u64, block: u64) -> SampleRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// `(block index, range of sample indices)` covering `0..n`.
pub fn blocks(n: usize) -> impl Iterator<Item = (u64, std::ops::Range<usize>)> {
    (0..n.div_ceil(BLOCK_SIZE)).map(move |b| {
        let start = b * BLOCK_SIZE;
        (b as u64, start..n.min(start + BLOCK_SIZE))
    })
}

/// Thread pool with `workers` threads; 0 means one per available core.
pub fn pool(workers: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("failed to build worker pool")
}
