//! AES in CBC and GCM modes behind algorithm-name dispatch.
//!
//! CBC output is PKCS#7-padded ciphertext. GCM output is
//! `ciphertext ‖ 16-byte tag` — the tag rides along at the end so callers
//! handle one opaque blob regardless of mode. Key and IV lengths are
//! re-checked here even though the policy layer validates them first.

use aes::cipher::block_padding::Pkcs7;
use aes::cipher::{BlockDecryptMut, BlockEncryptMut, KeyIvInit};
use aes_gcm::aead::{Aead, KeyInit, Payload};
use aes_gcm::{AesGcm, Nonce};

use super::instrument::record_op;
use super::CryptoError;

pub const SUPPORTED_CIPHERS: [&str; 6] = [
    "aes-128-cbc",
    "aes-128-gcm",
    "aes-192-cbc",
    "aes-192-gcm",
    "aes-256-cbc",
    "aes-256-gcm",
];

pub const GCM_TAG_LEN: usize = 16;
pub const GCM_NONCE_LEN: usize = 12;
pub const CBC_BLOCK_LEN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Cbc,
    Gcm,
}

#[derive(Debug, Clone, Copy)]
struct CipherSpec {
    key_len: usize,
    iv_len: usize,
    mode: Mode,
}

fn spec(algorithm: &str) -> Result<CipherSpec, CryptoError> {
    let (key_len, mode) = match algorithm.to_ascii_lowercase().as_str() {
        "aes-128-cbc" => (16, Mode::Cbc),
        "aes-192-cbc" => (24, Mode::Cbc),
        "aes-256-cbc" => (32, Mode::Cbc),
        "aes-128-gcm" => (16, Mode::Gcm),
        "aes-192-gcm" => (24, Mode::Gcm),
        "aes-256-gcm" => (32, Mode::Gcm),
        _ => {
            return Err(CryptoError::UnsupportedAlgorithm {
                name: algorithm.to_string(),
                supported: SUPPORTED_CIPHERS.join(", "),
            })
        }
    };
    let iv_len = match mode {
        Mode::Cbc => CBC_BLOCK_LEN,
        Mode::Gcm => GCM_NONCE_LEN,
    };
    Ok(CipherSpec { key_len, iv_len, mode })
}

fn check_lengths(algorithm: &str, spec: CipherSpec, key: &[u8], iv: &[u8]) -> Result<(), CryptoError> {
    if key.len() != spec.key_len {
        return Err(CryptoError::KeyLength {
            algorithm: algorithm.to_string(),
            expected: spec.key_len,
            got: key.len(),
        });
    }
    if iv.len() != spec.iv_len {
        return Err(CryptoError::IvLength {
            algorithm: algorithm.to_string(),
            expected: spec.iv_len,
            got: iv.len(),
        });
    }
    Ok(())
}

type Cbc128Enc = cbc::Encryptor<aes::Aes128>;
type Cbc192Enc = cbc::Encryptor<aes::Aes192>;
type Cbc256Enc = cbc::Encryptor<aes::Aes256>;
type Cbc128Dec = cbc::Decryptor<aes::Aes128>;
type Cbc192Dec = cbc::Decryptor<aes::Aes192>;
type Cbc256Dec = cbc::Decryptor<aes::Aes256>;
type Gcm128 = AesGcm<aes::Aes128, aes_gcm::aead::consts::U12>;
type Gcm192 = AesGcm<aes::Aes192, aes_gcm::aead::consts::U12>;
type Gcm256 = AesGcm<aes::Aes256, aes_gcm::aead::consts::U12>;

/// Encrypts `plaintext` under the named algorithm.
pub fn symmetric_encrypt(
    algorithm: &str,
    key: &[u8],
    iv: &[u8],
    plaintext: &[u8],
) -> Result<Vec<u8>, CryptoError> {
    let spec = spec(algorithm)?;
    check_lengths(algorithm, spec, key, iv)?;
    record_op();
    match spec.mode {
        Mode::Cbc => {
            let ct = match spec.key_len {
                16 => Cbc128Enc::new(key.into(), iv.into()).encrypt_padded_vec_mut::<Pkcs7>(plaintext),
                24 => Cbc192Enc::new(key.into(), iv.into()).encrypt_padded_vec_mut::<Pkcs7>(plaintext),
                _ => Cbc256Enc::new(key.into(), iv.into()).encrypt_padded_vec_mut::<Pkcs7>(plaintext),
            };
            Ok(ct)
        }
        Mode::Gcm => {
            let payload = Payload {
                msg: plaintext,
                aad: b"",
            };
            let nonce = Nonce::from_slice(iv);
            let result = match spec.key_len {
                16 => Gcm128::new(key.into()).encrypt(nonce, payload),
                24 => Gcm192::new(key.into()).encrypt(nonce, payload),
                _ => Gcm256::new(key.into()).encrypt(nonce, payload),
            };
            result.map_err(|_| CryptoError::EncryptionFailed {
                algorithm: algorithm.to_string(),
            })
        }
    }
}

/// Inverse of [`symmetric_encrypt`]. For GCM the last 16 bytes of
/// `ciphertext` are the authentication tag.
pub fn symmetric_decrypt(
    algorithm: &str,
    key: &[u8],
    iv: &[u8],
    ciphertext: &[u8],
) -> Result<Vec<u8>, CryptoError> {
    let spec = spec(algorithm)?;
    check_lengths(algorithm, spec, key, iv)?;
    match spec.mode {
        Mode::Cbc => {
            if ciphertext.is_empty() || ciphertext.len() % CBC_BLOCK_LEN != 0 {
                return Err(CryptoError::CiphertextFormat {
                    algorithm: algorithm.to_string(),
                    detail: format!(
                        "CBC ciphertext must be a positive multiple of {CBC_BLOCK_LEN} bytes, \
                         got {} bytes; the data may be truncated or decoded with the wrong \
                         input encoding",
                        ciphertext.len()
                    ),
                });
            }
            record_op();
            let pt = match spec.key_len {
                16 => Cbc128Dec::new(key.into(), iv.into()).decrypt_padded_vec_mut::<Pkcs7>(ciphertext),
                24 => Cbc192Dec::new(key.into(), iv.into()).decrypt_padded_vec_mut::<Pkcs7>(ciphertext),
                _ => Cbc256Dec::new(key.into(), iv.into()).decrypt_padded_vec_mut::<Pkcs7>(ciphertext),
            };
            pt.map_err(|_| CryptoError::DecryptionFailed {
                algorithm: algorithm.to_string(),
                detail: "padding check failed".to_string(),
            })
        }
        Mode::Gcm => {
            if ciphertext.len() < GCM_TAG_LEN {
                return Err(CryptoError::CiphertextFormat {
                    algorithm: algorithm.to_string(),
                    detail: format!(
                        "GCM ciphertext must end in a {GCM_TAG_LEN}-byte authentication tag, \
                         got only {} bytes; the data may be truncated or decoded with the \
                         wrong input encoding",
                        ciphertext.len()
                    ),
                });
            }
            record_op();
            let payload = Payload {
                msg: ciphertext,
                aad: b"",
            };
            let nonce = Nonce::from_slice(iv);
            let result = match spec.key_len {
                16 => Gcm128::new(key.into()).decrypt(nonce, payload),
                24 => Gcm192::new(key.into()).decrypt(nonce, payload),
                _ => Gcm256::new(key.into()).decrypt(nonce, payload),
            };
            result.map_err(|_| CryptoError::DecryptionFailed {
                algorithm: algorithm.to_string(),
                detail: "authentication tag mismatch".to_string(),
            })
        }
    }
}
