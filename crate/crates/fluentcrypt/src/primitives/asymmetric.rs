//! RSA key pairs and two-way public/private encryption.
//!
//! Two padding schemes cover the two conventional directions:
//!
//! * encrypt with the public key, decrypt with the private key — OAEP
//!   (SHA-256);
//! * encrypt with the private key, decrypt with the public key — PKCS#1
//!   v1.5 block type 1, the deterministic signature-style padding.
//!
//! Private keys travel as PKCS#8 PEM, public keys as SubjectPublicKeyInfo
//! PEM.

use rsa::hazmat::{rsa_decrypt_and_check, rsa_encrypt};
use rsa::pkcs1::{DecodeRsaPrivateKey, DecodeRsaPublicKey};
use rsa::pkcs8::{DecodePrivateKey, DecodePublicKey, EncodePrivateKey, EncodePublicKey, LineEnding};
use rsa::traits::PublicKeyParts;
use rsa::{BigUint, Oaep, RsaPrivateKey, RsaPublicKey};
use sha2::Sha256;

use super::instrument::record_op;
use super::random::{RandomSource, RngAdapter};
use super::CryptoError;

/// Smallest modulus this layer will generate, in bytes (1024 bits). The
/// policy layer typically demands far more.
pub const MIN_MODULUS_BYTES: u64 = 128;
/// Largest modulus this layer will generate, in bytes (4096 bits).
pub const MAX_MODULUS_BYTES: u64 = 512;

const OAEP_OVERHEAD: usize = 2 * 32 + 2; // SHA-256 based OAEP
const PKCS1_OVERHEAD: usize = 11;

/// A freshly generated RSA key pair in portable text form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyPair {
    public_pem: String,
    private_pem: String,
    modulus_length: u64,
}

impl KeyPair {
    pub fn public_pem(&self) -> &str {
        &self.public_pem
    }

    pub fn private_pem(&self) -> &str {
        &self.private_pem
    }

    /// Modulus size in bytes.
    pub fn modulus_length(&self) -> u64 {
        self.modulus_length
    }
}

/// One side of an RSA key pair, parsed and ready to use.
#[derive(Debug, Clone)]
pub enum AsymmetricKey {
    Public(RsaPublicKey),
    Private(Box<RsaPrivateKey>),
}

impl AsymmetricKey {
    /// Parses a public key from SubjectPublicKeyInfo or PKCS#1 PEM.
    pub fn from_public_pem(pem: &str) -> Result<Self, CryptoError> {
        RsaPublicKey::from_public_key_pem(pem)
            .or_else(|_| RsaPublicKey::from_pkcs1_pem(pem))
            .map(AsymmetricKey::Public)
            .map_err(|e| CryptoError::InvalidKey {
                detail: format!("could not parse public key PEM: {e}"),
            })
    }

    /// Parses a private key from PKCS#8 or PKCS#1 PEM.
    pub fn from_private_pem(pem: &str) -> Result<Self, CryptoError> {
        RsaPrivateKey::from_pkcs8_pem(pem)
            .or_else(|_| RsaPrivateKey::from_pkcs1_pem(pem))
            .map(|k| AsymmetricKey::Private(Box::new(k)))
            .map_err(|e| CryptoError::InvalidKey {
                detail: format!("could not parse private key PEM: {e}"),
            })
    }

    /// Modulus size in bytes.
    pub fn modulus_length(&self) -> u64 {
        match self {
            AsymmetricKey::Public(k) => k.size() as u64,
            AsymmetricKey::Private(k) => k.size() as u64,
        }
    }

    fn public(&self) -> RsaPublicKey {
        match self {
            AsymmetricKey::Public(k) => k.clone(),
            AsymmetricKey::Private(k) => RsaPublicKey::from(k.as_ref()),
        }
    }
}

/// Which padding scheme an RSA operation uses. `Oaep` pairs public-encrypt
/// with private-decrypt; `Pkcs1v15` pairs private-encrypt with
/// public-decrypt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsaPadding {
    Oaep,
    Pkcs1v15,
}

/// Generates a fresh RSA key pair with a modulus of `modulus_bytes` bytes.
///
/// Before returning, the pair is exercised with an encrypt/decrypt probe;
/// a pair that cannot round-trip is never handed out.
pub fn generate_keypair(
    random: &dyn RandomSource,
    modulus_bytes: u64,
) -> Result<KeyPair, CryptoError> {
    if !(MIN_MODULUS_BYTES..=MAX_MODULUS_BYTES).contains(&modulus_bytes) {
        return Err(CryptoError::UnsupportedKeySize {
            bytes: modulus_bytes,
            min: MIN_MODULUS_BYTES,
            max: MAX_MODULUS_BYTES,
        });
    }
    record_op();
    let mut rng = RngAdapter(random);
    let private = RsaPrivateKey::new(&mut rng, (modulus_bytes * 8) as usize).map_err(|e| {
        CryptoError::KeyGeneration {
            detail: e.to_string(),
        }
    })?;
    let public = RsaPublicKey::from(&private);

    let probe = b"key pair generation probe";
    let sealed = public
        .encrypt(&mut rng, Oaep::new::<Sha256>(), probe)
        .map_err(|e| CryptoError::KeyGeneration {
            detail: format!("probe encryption failed: {e}"),
        })?;
    let opened = private
        .decrypt(Oaep::new::<Sha256>(), &sealed)
        .map_err(|e| CryptoError::KeyGeneration {
            detail: format!("probe decryption failed: {e}"),
        })?;
    if opened != probe {
        return Err(CryptoError::KeyGeneration {
            detail: "probe round-trip produced different bytes".to_string(),
        });
    }

    let private_pem = private
        .to_pkcs8_pem(LineEnding::LF)
        .map_err(|e| CryptoError::KeyGeneration {
            detail: format!("private key encoding failed: {e}"),
        })?
        .to_string();
    let public_pem = public
        .to_public_key_pem(LineEnding::LF)
        .map_err(|e| CryptoError::KeyGeneration {
            detail: format!("public key encoding failed: {e}"),
        })?;
    Ok(KeyPair {
        public_pem,
        private_pem,
        modulus_length: modulus_bytes,
    })
}

/// Encrypts `data` with `key` under `padding`.
///
/// OAEP accepts either key (a private key contains the public half);
/// PKCS#1 v1.5 requires the private key.
pub fn asymmetric_encrypt(
    random: &dyn RandomSource,
    key: &AsymmetricKey,
    padding: RsaPadding,
    data: &[u8],
) -> Result<Vec<u8>, CryptoError> {
    let k = key.modulus_length() as usize;
    match padding {
        RsaPadding::Oaep => {
            let max = k.saturating_sub(OAEP_OVERHEAD);
            if data.len() > max {
                return Err(CryptoError::DataTooLarge {
                    max,
                    got: data.len(),
                    context: format!("rsa-{}-oaep", k * 8),
                });
            }
            record_op();
            let mut rng = RngAdapter(random);
            key.public()
                .encrypt(&mut rng, Oaep::new::<Sha256>(), data)
                .map_err(|e| CryptoError::EncryptionFailedDetail {
                    detail: e.to_string(),
                })
        }
        RsaPadding::Pkcs1v15 => {
            let AsymmetricKey::Private(private) = key else {
                return Err(CryptoError::KeyModeMismatch {
                    detail: "signature-style (PKCS#1 v1.5) encryption needs the private key; \
                             to encrypt with a public key use OAEP"
                        .to_string(),
                });
            };
            let max = k.saturating_sub(PKCS1_OVERHEAD);
            if data.len() > max {
                return Err(CryptoError::DataTooLarge {
                    max,
                    got: data.len(),
                    context: format!("rsa-{} with PKCS#1 v1.5 padding", k * 8),
                });
            }
            record_op();
            let em = pkcs1_type1_pad(data, k);
            let m = BigUint::from_bytes_be(&em);
            let mut rng = RngAdapter(random);
            let c = rsa_decrypt_and_check(private.as_ref(), Some(&mut rng), &m).map_err(|e| {
                CryptoError::EncryptionFailedDetail {
                    detail: e.to_string(),
                }
            })?;
            Ok(left_pad(&c.to_bytes_be(), k))
        }
    }
}

/// Decrypts `data` with `key` under `padding`: OAEP needs the private key,
/// PKCS#1 v1.5 (signature-style) needs only the public half.
pub fn asymmetric_decrypt(
    key: &AsymmetricKey,
    padding: RsaPadding,
    data: &[u8],
) -> Result<Vec<u8>, CryptoError> {
    let k = key.modulus_length() as usize;
    if data.len() > k {
        return Err(CryptoError::CiphertextFormat {
            algorithm: format!("rsa-{}", k * 8),
            detail: format!(
                "ciphertext is {} bytes but the modulus is only {k} bytes; the data may be \
                 decoded with the wrong input encoding",
                data.len()
            ),
        });
    }
    match padding {
        RsaPadding::Oaep => {
            let AsymmetricKey::Private(private) = key else {
                return Err(CryptoError::KeyModeMismatch {
                    detail: "OAEP decryption needs the private key; data encrypted with a \
                             private key is decrypted with the public key and PKCS#1 v1.5"
                        .to_string(),
                });
            };
            record_op();
            private
                .decrypt(Oaep::new::<Sha256>(), data)
                .map_err(|_| CryptoError::DecryptionFailed {
                    algorithm: format!("rsa-{}-oaep", k * 8),
                    detail: "OAEP padding check failed".to_string(),
                })
        }
        RsaPadding::Pkcs1v15 => {
            record_op();
            let c = BigUint::from_bytes_be(data);
            let m = rsa_encrypt(&key.public(), &c).map_err(|e| CryptoError::DecryptionFailed {
                algorithm: format!("rsa-{}", k * 8),
                detail: e.to_string(),
            })?;
            let em = left_pad(&m.to_bytes_be(), k);
            pkcs1_type1_unpad(&em).ok_or_else(|| CryptoError::DecryptionFailed {
                algorithm: format!("rsa-{}", k * 8),
                detail: "signature-style padding check failed".to_string(),
            })
        }
    }
}

/// `EM = 0x00 ‖ 0x01 ‖ 0xFF…FF ‖ 0x00 ‖ message`, always `k` bytes.
fn pkcs1_type1_pad(message: &[u8], k: usize) -> Vec<u8> {
    debug_assert!(message.len() + PKCS1_OVERHEAD <= k);
    let mut em = vec![0xffu8; k];
    em[0] = 0x00;
    em[1] = 0x01;
    let message_start = k - message.len();
    em[message_start - 1] = 0x00;
    em[message_start..].copy_from_slice(message);
    em
}

fn pkcs1_type1_unpad(em: &[u8]) -> Option<Vec<u8>> {
    if em.len() < PKCS1_OVERHEAD || em[0] != 0x00 || em[1] != 0x01 {
        return None;
    }
    let mut i = 2;
    while i < em.len() && em[i] == 0xff {
        i += 1;
    }
    // at least 8 bytes of 0xFF, then a 0x00 separator
    if i < 10 || i >= em.len() || em[i] != 0x00 {
        return None;
    }
    Some(em[i + 1..].to_vec())
}

fn left_pad(bytes: &[u8], width: usize) -> Vec<u8> {
    let mut out = vec![0u8; width.saturating_sub(bytes.len())];
    out.extend_from_slice(bytes);
    out
}
