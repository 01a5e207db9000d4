//! Deterministic random-number streams for Monte Carlo runs.
//!
//! Every Monte Carlo entry point takes an [`RngStream`] rather than a bare
//! generator so that trials can be parallelized across independent streams
//! while staying byte-for-byte reproducible: the same `(seed, stream_id)`
//! pair always yields the same sequence.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A named, reproducible random stream.
///
/// `seed` selects the experiment; `stream_id` selects an independent
/// sub-stream (one per trial, per thread, or per circuit as desired).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    /// Creates a stream description.
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngStream { seed, stream_id }
    }

    /// Returns the stream with the same seed and a different stream id.
    pub fn substream(&self, stream_id: u64) -> Self {
        RngStream { seed: self.seed, stream_id }
    }

    /// Instantiates the generator for this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_stream_reproduces() {
        let a: [u64; 4] = {
            let mut r = RngStream::new(7, 3).rng();
            core::array::from_fn(|_| r.gen())
        };
        let b: [u64; 4] = {
            let mut r = RngStream::new(7, 3).rng();
            core::array::from_fn(|_| r.gen())
        };
        assert_eq!(a, b);
    }

    #[test]
    fn different_streams_differ() {
        let mut a = RngStream::new(7, 0).rng();
        let mut b = RngStream::new(7, 1).rng();
        let xa: u64 = a.gen();
        let xb: u64 = b.gen();
        assert_ne!(xa, xb);
    }
}
