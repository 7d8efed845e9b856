//! Deterministic helpers for tests of the layers above the primitives.
//!
//! Nothing here is part of the supported API. The normal entry points
//! always draw from the OS CSPRNG; determinism is only available to code
//! that reaches into this module on purpose.

use crate::builder::FluentCrypt;
use crate::primitives::RandomSource;
use crate::rules::RuleSet;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use std::sync::Arc;
use std::sync::Mutex;

/// A seeded, reproducible stream of bytes. Not secure; test use only.
pub struct SeededRandom {
    inner: Mutex<ChaCha20Rng>,
}

impl SeededRandom {
    pub fn new(seed: u64) -> Self {
        SeededRandom {
            inner: Mutex::new(ChaCha20Rng::seed_from_u64(seed)),
        }
    }
}

impl RandomSource for SeededRandom {
    fn fill_bytes(&self, dest: &mut [u8]) {
        self.inner.lock().expect("rng lock").fill_bytes(dest);
    }
}

/// A context over `rules` whose randomness replays deterministically from
/// `seed`.
pub fn seeded_context(rules: RuleSet, seed: u64) -> FluentCrypt {
    FluentCrypt::with_rule_set(rules).with_random_source(Arc::new(SeededRandom::new(seed)))
}

/// A deterministic context over the embedded default rules.
pub fn seeded_default_context(seed: u64) -> FluentCrypt {
    seeded_context(crate::rules::default_rule_set(), seed)
}
