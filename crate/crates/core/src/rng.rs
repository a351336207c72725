//! Counter-based, splittable random streams.
//!
//! A [`Stream`] is a 64-bit key. Output `i` of a stream is a pure function of
//! `(key, i)`, and child streams are derived by hashing the parent key with a
//! label, so any unit of work (a repetition, a grid point, one side of an
//! interval) can be given its own reproducible stream regardless of the order
//! in which work is scheduled.
//!
//! The mixing function is the SplitMix64 finalizer.

use rand::RngCore;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable 64-bit hash of a byte string (FNV-1a followed by a mix).
pub fn hash_label(label: &str) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    mix64(h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Stream {
    key: u64,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Self {
            key: mix64(seed ^ GOLDEN_GAMMA),
        }
    }

    pub fn key(self) -> u64 {
        self.key
    }

    /// Derives an independent child stream.
    pub fn child(self, label: u64) -> Self {
        Self {
            key: mix64(
                self.key ^ mix64(label.wrapping_add(GOLDEN_GAMMA).wrapping_mul(GOLDEN_GAMMA)),
            ),
        }
    }

    pub fn child_str(self, label: &str) -> Self {
        self.child(hash_label(label))
    }

    /// The `counter`-th 64-bit output of this stream.
    #[inline]
    pub fn at(self, counter: u64) -> u64 {
        mix64(
            self.key
                .wrapping_add(counter.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)),
        )
    }

    /// A uniform draw in `(0, 1]`, the `counter`-th of this stream.
    #[inline]
    pub fn unit_open_at(self, counter: u64) -> f64 {
        ((self.at(counter) >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn rng(self) -> CounterRng {
        CounterRng {
            stream: self,
            counter: 0,
        }
    }
}

/// Sequential generator over a [`Stream`]; implements [`RngCore`] so it can
/// drive `rand` distributions.
#[derive(Debug, Clone)]
pub struct CounterRng {
    stream: Stream,
    counter: u64,
}

impl RngCore for CounterRng {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        let out = self.stream.at(self.counter);
        self.counter = self.counter.wrapping_add(1);
        out
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let bytes = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}
