//! Randomness for key, IV and salt generation.

use rand::rngs::OsRng;
use rand::RngCore;

/// Source of cryptographically secure random bytes.
///
/// Production code always uses [`OsRandom`]; the trait exists so that tests
/// of the higher layers can inject a deterministic source (see the hidden
/// `testing` module). Implementations must be safe to share across threads.
pub trait RandomSource: Send + Sync {
    fn fill_bytes(&self, dest: &mut [u8]);
}

/// The operating system's CSPRNG.
///
/// Panics if the OS entropy source is unavailable; there is no safe way to
/// continue a crypto operation without entropy.
#[derive(Debug, Clone, Copy, Default)]
pub struct OsRandom;

impl RandomSource for OsRandom {
    fn fill_bytes(&self, dest: &mut [u8]) {
        OsRng.fill_bytes(dest);
    }
}

/// `n` fresh bytes from the OS CSPRNG.
pub fn random_bytes(n: usize) -> Vec<u8> {
    let mut bytes = vec![0u8; n];
    OsRandom.fill_bytes(&mut bytes);
    bytes
}

/// Adapter so the RSA layer, which wants a `rand` RNG, can draw from a
/// [`RandomSource`].
pub(crate) struct RngAdapter<'a>(pub &'a dyn RandomSource);

impl RngCore for RngAdapter<'_> {
    fn next_u32(&mut self) -> u32 {
        let mut buf = [0u8; 4];
        self.0.fill_bytes(&mut buf);
        u32::from_le_bytes(buf)
    }

    fn next_u64(&mut self) -> u64 {
        let mut buf = [0u8; 8];
        self.0.fill_bytes(&mut buf);
        u64::from_le_bytes(buf)
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.0.fill_bytes(dest);
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.0.fill_bytes(dest);
        Ok(())
    }
}

// The production source is OS-backed; the deterministic source exists only
// behind the hidden testing seam.
impl rand::CryptoRng for RngAdapter<'_> {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_bytes_is_empty() {
        assert!(random_bytes(0).is_empty());
    }

    #[test]
    fn requested_length_is_honored() {
        assert_eq!(random_bytes(16).len(), 16);
    }

    #[test]
    fn successive_values_differ() {
        assert_ne!(random_bytes(16), random_bytes(16));
    }

    #[test]
    fn many_draws_are_distinct() {
        let mut seen = std::collections::HashSet::new();
        for _ in 0..1000 {
            assert!(seen.insert(random_bytes(16)));
        }
    }
}
