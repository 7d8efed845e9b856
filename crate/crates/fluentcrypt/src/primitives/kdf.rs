//! Password-based key derivation (PBKDF2).

use super::instrument::record_op;
use super::CryptoError;
use crate::secret::SecretBytes;

pub const SUPPORTED_DIGESTS: [&str; 4] = ["sha1", "sha256", "sha384", "sha512"];

/// How a symmetric key came to be. Derived keys remember their derivation
/// parameters — minus the password, which is never stored — so the policy
/// layer can check iteration and salt constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KeyProvenance {
    Derived {
        salt: Vec<u8>,
        iterations: u32,
        digest: String,
        derived_length: u64,
    },
    UserSupplied,
}

/// Key material for symmetric encryption, tagged with its provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricKey {
    bytes: SecretBytes,
    provenance: KeyProvenance,
}

impl SymmetricKey {
    /// Wraps key bytes the caller obtained elsewhere. Only the length of
    /// such a key can ever be checked; whether it was generated securely is
    /// unknowable from here.
    pub fn from_user_bytes(bytes: impl Into<SecretBytes>) -> Self {
        SymmetricKey {
            bytes: bytes.into(),
            provenance: KeyProvenance::UserSupplied,
        }
    }

    pub fn bytes(&self) -> &[u8] {
        self.bytes.as_bytes()
    }

    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bytes.is_empty()
    }

    pub fn provenance(&self) -> &KeyProvenance {
        &self.provenance
    }

    pub fn to_hex(&self) -> String {
        self.bytes.to_hex()
    }
}

/// Stretches `password` into a `length`-byte key with PBKDF2-HMAC.
///
/// Deterministic: the same inputs always produce the same key. `digest`
/// names the HMAC hash (`sha1`, `sha256`, `sha384` or `sha512`,
/// case-insensitive).
pub fn derive_key(
    password: &[u8],
    salt: &[u8],
    iterations: u32,
    digest: &str,
    length: u64,
) -> Result<SymmetricKey, CryptoError> {
    if iterations == 0 {
        return Err(CryptoError::NotPositive { what: "iterations" });
    }
    if length == 0 {
        return Err(CryptoError::NotPositive { what: "derived key length" });
    }
    record_op();
    let mut out = vec![0u8; length as usize];
    match digest.to_ascii_lowercase().as_str() {
        "sha1" => pbkdf2::pbkdf2_hmac::<sha1::Sha1>(password, salt, iterations, &mut out),
        "sha256" => pbkdf2::pbkdf2_hmac::<sha2::Sha256>(password, salt, iterations, &mut out),
        "sha384" => pbkdf2::pbkdf2_hmac::<sha2::Sha384>(password, salt, iterations, &mut out),
        "sha512" => pbkdf2::pbkdf2_hmac::<sha2::Sha512>(password, salt, iterations, &mut out),
        _ => {
            return Err(CryptoError::UnsupportedDigest {
                name: digest.to_string(),
                supported: SUPPORTED_DIGESTS.join(", "),
            })
        }
    }
    Ok(SymmetricKey {
        bytes: SecretBytes::new(out),
        provenance: KeyProvenance::Derived {
            salt: salt.to_vec(),
            iterations,
            digest: digest.to_ascii_lowercase(),
            derived_length: length,
        },
    })
}
