//! Byte buffers that hold secret material.

use std::fmt;
use zeroize::Zeroizing;

/// Secret bytes (keys, passwords). The buffer is zeroed on drop and the
/// `Debug` output never shows the contents, only the length, so secrets
/// cannot leak through logging or error formatting.
#[derive(Clone, PartialEq, Eq)]
pub struct SecretBytes(Zeroizing<Vec<u8>>);

impl SecretBytes {
    pub fn new(bytes: Vec<u8>) -> Self {
        SecretBytes(Zeroizing::new(bytes))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Hex rendering, for the dedicated getters that intentionally expose
    /// material (e.g. handing an encryption key to the decrypting party).
    pub fn to_hex(&self) -> String {
        hex::encode(self.0.as_slice())
    }
}

impl fmt::Debug for SecretBytes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SecretBytes(<{} bytes>)", self.0.len())
    }
}

impl From<&[u8]> for SecretBytes {
    fn from(bytes: &[u8]) -> Self {
        SecretBytes::new(bytes.to_vec())
    }
}

impl From<Vec<u8>> for SecretBytes {
    fn from(bytes: Vec<u8>) -> Self {
        SecretBytes::new(bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn debug_shows_length_only() {
        let secret = SecretBytes::new(vec![0xde, 0xad, 0xbe, 0xef]);
        let rendered = format!("{secret:?}");
        assert_eq!(rendered, "SecretBytes(<4 bytes>)");
        assert!(!rendered.contains("dead"));
    }

    #[test]
    fn hex_is_explicit() {
        let secret = SecretBytes::new(vec![0x01, 0x02]);
        assert_eq!(secret.to_hex(), "0102");
    }
}
