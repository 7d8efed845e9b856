//! Cryptographic hash functions.

use super::encoding::{encode_bytes, Encoding, Output};
use super::instrument::record_op;
use super::CryptoError;
use sha2::Digest;

pub const SUPPORTED_HASHES: [&str; 4] = ["sha1", "sha256", "sha384", "sha512"];

/// Digest of `data` as raw bytes.
pub fn hash_bytes(data: &[u8], algorithm: &str) -> Result<Vec<u8>, CryptoError> {
    record_op();
    let digest = match algorithm.to_ascii_lowercase().as_str() {
        "sha1" => sha1::Sha1::digest(data).to_vec(),
        "sha256" => sha2::Sha256::digest(data).to_vec(),
        "sha384" => sha2::Sha384::digest(data).to_vec(),
        "sha512" => sha2::Sha512::digest(data).to_vec(),
        _ => {
            return Err(CryptoError::UnsupportedAlgorithm {
                name: algorithm.to_string(),
                supported: SUPPORTED_HASHES.join(", "),
            })
        }
    };
    Ok(digest)
}

/// Digest of `data`, encoded per `out`.
pub fn hash(data: &[u8], algorithm: &str, out: Encoding) -> Result<Output, CryptoError> {
    let digest = hash_bytes(data, algorithm)?;
    Ok(encode_bytes(out, &digest)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_of_empty_input() {
        let digest = hash(b"", "sha256", Encoding::Hex).unwrap();
        assert_eq!(
            digest.as_text(),
            Some("e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855")
        );
    }

    #[test]
    fn sha256_of_abc() {
        let digest = hash(b"abc", "sha256", Encoding::Hex).unwrap();
        assert_eq!(
            digest.as_text(),
            Some("ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad")
        );
    }

    #[test]
    fn hashing_is_deterministic() {
        assert_eq!(
            hash_bytes(b"same input", "sha512").unwrap(),
            hash_bytes(b"same input", "sha512").unwrap()
        );
    }

    #[test]
    fn unsupported_algorithm_is_rejected() {
        let err = hash(b"x", "md5", Encoding::Hex).unwrap_err();
        assert!(err.to_string().contains("md5"));
    }

    #[test]
    fn digest_lengths() {
        assert_eq!(hash_bytes(b"", "sha256").unwrap().len(), 32);
        assert_eq!(hash_bytes(b"", "sha384").unwrap().len(), 48);
        assert_eq!(hash_bytes(b"", "sha512").unwrap().len(), 64);
    }
}
