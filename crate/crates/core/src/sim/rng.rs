//! Counter-based random streams.
//!
//! Every matrix draw gets its own ChaCha stream: the key comes from the
//! run seed and the 64-bit nonce packs `(outer, slot)`. Slot 0 is the
//! unperturbed matrix of an outer realization and slots `1..=inner` its
//! perturbations. Draws therefore do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::{FidelityError, Result};

const SLOT_BITS: u32 = 24;

/// Largest supported number of inner realizations per outer one.
pub const MAX_INNER: u64 = (1 << SLOT_BITS) - 1;
/// Largest supported number of outer realizations.
pub const MAX_OUTER: u64 = 1 << (64 - SLOT_BITS);

/// Identifies one matrix draw within a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub seed: u64,
    pub outer: u64,
    pub slot: u64,
}

impl StreamKey {
    pub fn new(seed: u64, outer: u64, slot: u64) -> Result<Self> {
        if outer >= MAX_OUTER || slot > MAX_INNER {
            return Err(FidelityError::Config(format!(
                "stream index out of range (outer {outer}, slot {slot})"
            )));
        }
        Ok(Self { seed, outer, slot })
    }

    pub fn nonce(&self) -> u64 {
        (self.outer << SLOT_BITS) | self.slot
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(self.nonce());
        rng
    }
}
