use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Root of a deterministic random stream.
///
/// Streams are ChaCha8 so that outputs are identical across platforms.
/// Independent sub-tasks take [`RngSeed::child`] seeds, which makes results
/// independent of how the sub-tasks are scheduled across threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Seed of the `index`-th child stream.
    pub fn child(self, index: u64) -> Self {
        Self(splitmix64(splitmix64(self.0) ^ splitmix64(index.wrapping_add(0x5851_f42d_4c95_7f2d))))
    }

    /// Seed derived from this one and the bit patterns of `values`; equal
    /// inputs give equal seeds.
    pub fn mix_f64(self, values: &[f64]) -> Self {
        let mut h = splitmix64(self.0 ^ values.len() as u64);
        for v in values {
            h = splitmix64(h ^ v.to_bits());
        }
        Self(h)
    }
}

impl From<u64> for RngSeed {
    fn from(seed: u64) -> Self {
        Self(seed)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
