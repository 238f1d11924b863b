//! Seeded uniform sampling of machines.
//!
//! Every random decision in the crate is drawn from an [`RngStream`]. Batch
//! work gives trial `t` its own stream seeded with [`derive_seed`], so results
//! do not depend on how trials are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::machine::{Bnm, NodeSpec, TruthTable};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for sub-stream `index` of `master`:
/// `splitmix64(master + (index + 1) * 0x9E3779B97F4A7C15)` with wrapping arithmetic.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// A single-owner deterministic random stream (ChaCha8 keyed from a 64-bit seed).
#[derive(Debug, Clone)]
pub struct RngStream(ChaCha8Rng);

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn for_trial(master: u64, trial: u64) -> Self {
        RngStream::new(derive_seed(master, trial))
    }

    /// Uniform draw from `0..n`. Panics if `n == 0`.
    pub fn below(&mut self, n: usize) -> usize {
        // u32 keeps the draw identical on 32- and 64-bit targets.
        let n = u32::try_from(n).expect("range exceeds u32");
        self.0.gen_range(0..n) as usize
    }
}

/// Draws, for each node in order, a truth table, then `in0`, then `in1`.
/// The output node is always node 0.
pub fn sample_bnm(size: usize, rng: &mut RngStream) -> Result<Bnm> {
    if size == 0 {
        return Err(Error::ZeroSize);
    }
    let nodes = (0..size)
        .map(|_| {
            let tt = TruthTable::new(rng.below(16) as u8).expect("draw below 16");
            let in0 = rng.below(size);
            let in1 = rng.below(size);
            NodeSpec::new(tt, in0, in1)
        })
        .collect();
    Bnm::new(nodes, 0)
}

pub fn sample_batch(size: usize, count: usize, master_seed: u64) -> Result<Vec<Bnm>> {
    if size == 0 {
        return Err(Error::ZeroSize);
    }
    (0..count as u64)
        .into_par_iter()
        .map(|t| sample_bnm(size, &mut RngStream::for_trial(master_seed, t)))
        .collect()
}
