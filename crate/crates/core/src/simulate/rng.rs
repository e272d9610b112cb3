//! Counter-based random streams.
//!
//! Every stream is a ChaCha8 generator whose 256-bit key is the tuple
//! `(master seed, replicate, network, tag)`. ChaCha is a PRF in its key, so
//! distinct tuples give independent streams and the draws for a network do
//! not depend on which thread produced them or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamTag {
    /// Assignment, network effect and unit noise of one egonetwork.
    Network = 0x6e65_7477,
}

pub fn stream_rng(master: u64, replicate: u64, network: u64, tag: StreamTag) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    for (chunk, word) in key
        .chunks_exact_mut(8)
        .zip([master, replicate, network, tag as u64])
    {
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
