//! The effective configuration of one crypto task, with per-field
//! provenance: every populated field knows whether the engine chose it or
//! the caller supplied it. Validation treats the two differently — the
//! engine can vouch for its own choices, but user-supplied material can
//! only be checked against what the rules say.

use crate::primitives::Encoding;
use crate::secret::SecretBytes;

/// The kind of crypto task being configured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TaskKind {
    Hash,
    SymmetricEncrypt,
    SymmetricDecrypt,
    AsymmetricEncrypt,
    AsymmetricDecrypt,
    KeyPairGen,
}

impl TaskKind {
    /// Name of the rule-file section that governs this task.
    pub fn section_name(self) -> &'static str {
        match self {
            TaskKind::Hash => "Hash",
            TaskKind::SymmetricEncrypt | TaskKind::SymmetricDecrypt => "Cipher",
            TaskKind::AsymmetricEncrypt | TaskKind::AsymmetricDecrypt | TaskKind::KeyPairGen => {
                "KeyPair"
            }
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            TaskKind::Hash => "hashing",
            TaskKind::SymmetricEncrypt => "symmetric encryption",
            TaskKind::SymmetricDecrypt => "symmetric decryption",
            TaskKind::AsymmetricEncrypt => "asymmetric encryption",
            TaskKind::AsymmetricDecrypt => "asymmetric decryption",
            TaskKind::KeyPairGen => "key-pair generation",
        }
    }

    pub fn is_symmetric(self) -> bool {
        matches!(self, TaskKind::SymmetricEncrypt | TaskKind::SymmetricDecrypt)
    }
}

/// Whether a configuration value was filled in by the engine or supplied by
/// the caller.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Default,
    UserSupplied,
}

/// A value tagged with its provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sourced<T> {
    pub value: T,
    pub provenance: Provenance,
}

impl<T> Sourced<T> {
    pub fn engine(value: T) -> Self {
        Sourced {
            value,
            provenance: Provenance::Default,
        }
    }

    pub fn user(value: T) -> Self {
        Sourced {
            value,
            provenance: Provenance::UserSupplied,
        }
    }

    pub fn is_user_supplied(&self) -> bool {
        self.provenance == Provenance::UserSupplied
    }
}

/// PBKDF2 parameters for deriving a symmetric key from a password.
#[derive(Clone, PartialEq, Eq)]
pub struct KdfParams {
    pub password: SecretBytes,
    /// Not secret (it is handed to the decrypting party), but still kept out
    /// of error texts; only the dedicated getter exposes it.
    pub salt: Vec<u8>,
    pub iterations: u32,
    pub digest: String,
    /// Key length to derive, in bytes.
    pub derived_length: u64,
}

impl std::fmt::Debug for KdfParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KdfParams")
            .field("password", &self.password)
            .field("salt", &format_args!("<{} bytes>", self.salt.len()))
            .field("iterations", &self.iterations)
            .field("digest", &self.digest)
            .field("derived_length", &self.derived_length)
            .finish()
    }
}

/// Everything that determines what one crypto task will do. Built by the
/// fluent layer, judged by [`validate_config`](crate::rules::RuleSet::validate_config),
/// and executed only if the judgment is clean.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CryptoConfig {
    pub task: TaskKind,
    pub algorithm: Option<Sourced<String>>,
    pub key: Option<Sourced<SecretBytes>>,
    pub iv: Option<Sourced<Vec<u8>>>,
    pub kdf: Option<Sourced<KdfParams>>,
    pub input_encoding: Sourced<Encoding>,
    pub output_encoding: Sourced<Encoding>,
    /// RSA modulus size in bytes, for key-pair generation and asymmetric
    /// tasks.
    pub modulus_length: Option<Sourced<u64>>,
}

impl CryptoConfig {
    pub fn new(task: TaskKind) -> Self {
        let (input, output) = default_encodings(task);
        CryptoConfig {
            task,
            algorithm: None,
            key: None,
            iv: None,
            kdf: None,
            input_encoding: Sourced::engine(input),
            output_encoding: Sourced::engine(output),
            modulus_length: None,
        }
    }
}

/// Task-appropriate encodings used when the caller sets none: plain text in
/// and hex out for encryption and hashing, the reverse for decryption.
pub fn default_encodings(task: TaskKind) -> (Encoding, Encoding) {
    match task {
        TaskKind::Hash => (Encoding::Utf8, Encoding::Hex),
        TaskKind::SymmetricEncrypt | TaskKind::AsymmetricEncrypt => (Encoding::Utf8, Encoding::Hex),
        TaskKind::SymmetricDecrypt | TaskKind::AsymmetricDecrypt => (Encoding::Hex, Encoding::Utf8),
        TaskKind::KeyPairGen => (Encoding::Utf8, Encoding::Utf8),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn section_mapping() {
        assert_eq!(TaskKind::Hash.section_name(), "Hash");
        assert_eq!(TaskKind::SymmetricEncrypt.section_name(), "Cipher");
        assert_eq!(TaskKind::SymmetricDecrypt.section_name(), "Cipher");
        assert_eq!(TaskKind::KeyPairGen.section_name(), "KeyPair");
    }

    #[test]
    fn encoding_defaults_mirror_each_other() {
        let (enc_in, enc_out) = default_encodings(TaskKind::SymmetricEncrypt);
        let (dec_in, dec_out) = default_encodings(TaskKind::SymmetricDecrypt);
        assert_eq!(enc_in, dec_out);
        assert_eq!(enc_out, dec_in);
    }

    #[test]
    fn kdf_debug_never_shows_material() {
        let params = KdfParams {
            password: SecretBytes::new(b"hunter2".to_vec()),
            salt: b"0123456789".to_vec(),
            iterations: 10,
            digest: "sha256".to_string(),
            derived_length: 16,
        };
        let rendered = format!("{params:?}");
        assert!(!rendered.contains("hunter2"));
        assert!(!rendered.contains("0123456789"));
    }
}
