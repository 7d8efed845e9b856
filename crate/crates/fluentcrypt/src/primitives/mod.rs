//! Thin adapters over the cryptographic primitives: CSPRNG, PBKDF2, hash
//! functions, AES-CBC/GCM, RSA. No policy lives here — whether a
//! configuration is *allowed* is the rule engine's business — but sizes are
//! still re-checked as a second line of defense, and decryption failures
//! come back with their likely causes spelled out.
//!
//! Everything in this module is reentrant and thread-safe; apart from
//! [`random_bytes`] and [`generate_keypair`], every operation is a pure
//! function of its inputs.

pub mod asymmetric;
pub mod digest;
pub mod encoding;
#[doc(hidden)]
pub mod instrument;
pub mod kdf;
pub mod random;
pub mod symmetric;

pub use asymmetric::{
    asymmetric_decrypt, asymmetric_encrypt, generate_keypair, AsymmetricKey, KeyPair, RsaPadding,
};
pub use digest::{hash, hash_bytes};
pub use encoding::{decode_text, encode_bytes, Encoding, EncodingError, Output};
pub use kdf::{derive_key, KeyProvenance, SymmetricKey};
pub use random::{random_bytes, OsRandom, RandomSource};
pub use symmetric::{symmetric_decrypt, symmetric_encrypt};

use thiserror::Error;

/// Failure inside a primitive operation.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CryptoError {
    #[error("unsupported algorithm '{name}'; supported: {supported}")]
    UnsupportedAlgorithm { name: String, supported: String },

    #[error("unsupported key-derivation digest '{name}'; supported: {supported}")]
    UnsupportedDigest { name: String, supported: String },

    #[error("{what} must be at least 1")]
    NotPositive { what: &'static str },

    #[error("key for {algorithm} must be {expected} bytes, got {got} bytes")]
    KeyLength {
        algorithm: String,
        expected: usize,
        got: usize,
    },

    #[error("IV for {algorithm} must be {expected} bytes, got {got} bytes")]
    IvLength {
        algorithm: String,
        expected: usize,
        got: usize,
    },

    #[error("malformed ciphertext for {algorithm}: {detail}")]
    CiphertextFormat { algorithm: String, detail: String },

    #[error(
        "decryption with {algorithm} failed: {detail}; likely causes are a wrong key, a wrong \
         IV, or corrupted / mis-encoded ciphertext"
    )]
    DecryptionFailed { algorithm: String, detail: String },

    #[error("encryption with {algorithm} failed")]
    EncryptionFailed { algorithm: String },

    #[error("encryption failed: {detail}")]
    EncryptionFailedDetail { detail: String },

    #[error("data is too large for {context}: at most {max} bytes fit, got {got} bytes")]
    DataTooLarge {
        max: usize,
        got: usize,
        context: String,
    },

    #[error("key/mode mismatch: {detail}")]
    KeyModeMismatch { detail: String },

    #[error("invalid key material: {detail}")]
    InvalidKey { detail: String },

    #[error(
        "unsupported key size: {bytes} modulus bytes; this build generates between {min} and \
         {max} bytes"
    )]
    UnsupportedKeySize { bytes: u64, min: u64, max: u64 },

    #[error("key generation failed: {detail}")]
    KeyGeneration { detail: String },

    #[error(transparent)]
    Encoding(#[from] EncodingError),
}
