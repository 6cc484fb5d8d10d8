//! Counter-based seeded randomness.
//!
//! A [`Seed`] keys a ChaCha8 keystream: `value` expands to the key and
//! `stream` selects the ChaCha stream. Word `i` of the keystream is a pure
//! function of `(value, stream, i)`, so any entry of a generated object is
//! addressable directly and parallel fills are bitwise identical to
//! sequential ones.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed {
    pub value: u64,
    pub stream: u64,
}

/// Stream labels used to separate the randomness of different objects
/// derived from one seed.
pub(crate) mod label {
    pub const PLANT: u64 = 0x706c_616e_7400_0001;
    pub const TRIAL: u64 = 0x7472_6961_6c00_0002;
    pub const SENSING_BLOCK: u64 = 0x626c_6f63_6b00_0003;
}

impl Seed {
    pub const fn new(value: u64) -> Self {
        Self { value, stream: 0 }
    }

    pub const fn with_stream(value: u64, stream: u64) -> Self {
        Self { value, stream }
    }

    /// Independent substream for a labelled purpose and index.
    pub fn derive(self, label: u64, index: u64) -> Self {
        Self {
            value: self.value,
            stream: splitmix(splitmix(self.stream ^ label).wrapping_add(index)),
        }
    }

    pub(crate) fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.value);
        rng.set_stream(self.stream);
        rng
    }

    pub(crate) fn bits(self) -> CounterBits {
        CounterBits { rng: self.rng() }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Random access to fair bits: bit `i` is the low bit of keystream word `i`.
pub(crate) struct CounterBits {
    rng: ChaCha8Rng,
}

impl CounterBits {
    /// Fills `out[j]` with bit `start + j`.
    pub(crate) fn fill(&mut self, start: u64, out: &mut [bool]) {
        self.rng.set_word_pos(start as u128);
        for slot in out.iter_mut() {
            *slot = self.rng.next_u32() & 1 == 1;
        }
    }

    #[cfg(test)]
    pub(crate) fn bit(&mut self, index: u64) -> bool {
        let mut b = [false];
        self.fill(index, &mut b);
        b[0]
    }
}

/// Uniform `u64` in `0..=max`, independent of pointer width.
pub(crate) fn uniform_inclusive(rng: &mut ChaCha8Rng, max: u64) -> u64 {
    rng.random_range(0..=max)
}
