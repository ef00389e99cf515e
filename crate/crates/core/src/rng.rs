//! Counter-based random substreams.
//!
//! Every random quantity in the laboratory is drawn from a ChaCha8 stream
//! addressed by `(master, stream, replica, lane)`:
//!
//! * the 256-bit key is the SplitMix64 expansion of `master` and `stream`;
//! * the ChaCha stream number is `replica << 2 | lane`.
//!
//! A replica therefore sees the same numbers no matter which worker runs it or
//! in which order replicas are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used throughout the crate.
pub type SimRng = ChaCha8Rng;

/// Independent lanes available to each replica.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Lane {
    /// Underlying random walk increments.
    Walk = 0,
    /// Gaps ζ_1, ζ_2, … on the positive side of the medium.
    MediumPositive = 1,
    /// Gaps ζ_0, ζ_-1, … on the negative side of the medium.
    MediumNegative = 2,
    /// Reference draws and anything else.
    Aux = 3,
}

/// Well-known stream identifiers. Scenario code combines these with point and
/// repetition indices through [`stream_id`].
pub mod streams {
    pub const ENSEMBLE: u64 = 0x0100;
    pub const MEDIUM: u64 = 0x0200;
    pub const REFERENCE: u64 = 0x0300;
    pub const LIMIT: u64 = 0x0400;
}

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a base stream tag with a point index and a repetition index.
pub fn stream_id(base: u64, point: u64, repetition: u64) -> u64 {
    let mut s = base ^ point.rotate_left(17) ^ repetition.rotate_left(41);
    splitmix64(&mut s)
}

/// The substream for `(master, stream, replica, lane)`.
pub fn substream(master: u64, stream: u64, replica: u64, lane: Lane) -> SimRng {
    let mut state = master ^ splitmix64(&mut stream.clone());
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(seed);
    rng.set_stream((replica << 2) | lane as u64);
    rng
}

/// Seed of a single medium realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct MediumSeed {
    pub master: u64,
    pub stream: u64,
    pub replica: u64,
}

impl MediumSeed {
    pub fn new(master: u64, stream: u64, replica: u64) -> Self {
        Self {
            master,
            stream,
            replica,
        }
    }

    /// Stable identity token of the realization.
    pub fn token(&self) -> u64 {
        let mut s = self.master;
        let a = splitmix64(&mut s);
        let mut s = self.stream ^ a;
        let b = splitmix64(&mut s);
        let mut s = self.replica ^ b;
        splitmix64(&mut s)
    }

    pub fn positive_rng(&self) -> SimRng {
        substream(self.master, self.stream, self.replica, Lane::MediumPositive)
    }

    pub fn negative_rng(&self) -> SimRng {
        substream(self.master, self.stream, self.replica, Lane::MediumNegative)
    }
}
