//! The task-oriented fluent layer.
//!
//! Callers say *what* they want — [`encryption()`], [`decryption()`],
//! [`hashing()`], [`keypair()`] — optionally chain configuration, and call
//! [`TaskBuilder::run`]. Everything left unset is filled from the rules in
//! force (the first value of each constraint is the secure default), the
//! complete configuration is validated, and only a clean configuration ever
//! reaches a primitive.
//!
//! Configuration order never matters: methods record intent and all
//! resolution happens inside `run()`. Repeated calls to the same setter
//! overwrite (last call wins), and key-derivation settings take precedence
//! over a directly set key. Builders are consumed by `run()`, so a stale
//! builder can never replay an IV or salt.

mod result;

pub use result::RunResult;

use crate::error::Error;
use crate::primitives::encoding::{decode_text, encode_bytes, Encoding};
use crate::primitives::{
    asymmetric_decrypt, asymmetric_encrypt, derive_key, generate_keypair, hash_bytes,
    symmetric_decrypt, symmetric_encrypt, AsymmetricKey, OsRandom, RandomSource, RsaPadding,
};
use crate::rules::{
    load_rules, CryptoConfig, KdfParams, RuleLoadError, RuleQueryError, RuleSet, Sourced,
    TaskKind, ValidationOk, Violation,
};
use crate::secret::SecretBytes;
use std::path::Path;
use std::sync::Arc;

/// One run handles at most this much input data (streaming is out of
/// scope for this version).
pub const MAX_PAYLOAD_BYTES: usize = 64 * 1024;

// Decryption inputs may exceed the cap by one padding block or GCM tag.
const MAX_CIPHERTEXT_BYTES: usize = MAX_PAYLOAD_BYTES + 32;

/// Fallbacks used only when the rule file leaves a knob unconstrained.
const FALLBACK_ITERATIONS: u32 = 100_000;
const FALLBACK_SALT_LENGTH: u64 = 16;
const DEFAULT_KDF_DIGEST: &str = "sha256";

/// Starts a symmetric (default) or asymmetric encryption task under the
/// rules in force (`FLUENTCRYPT_RULES` or the embedded policy).
pub fn encryption() -> TaskBuilder {
    builder_with_default_context(BuilderTask::Encrypt)
}

/// Starts a decryption task under the rules in force.
pub fn decryption() -> TaskBuilder {
    builder_with_default_context(BuilderTask::Decrypt)
}

/// Starts a hashing task under the rules in force.
pub fn hashing() -> TaskBuilder {
    builder_with_default_context(BuilderTask::Hash)
}

/// Starts a key-pair generation task under the rules in force.
pub fn keypair() -> TaskBuilder {
    builder_with_default_context(BuilderTask::KeyPair)
}

fn builder_with_default_context(task: BuilderTask) -> TaskBuilder {
    match FluentCrypt::new() {
        Ok(ctx) => ctx.builder(task),
        Err(e) => TaskBuilder::new(task, Err(e), Arc::new(OsRandom)),
    }
}

/// A reusable entry point bound to one rule set; handy for loading custom
/// rules once and starting many tasks from them. The context is cheap to
/// clone and safe to share across threads.
#[derive(Clone)]
pub struct FluentCrypt {
    rules: Arc<RuleSet>,
    random: Arc<dyn RandomSource>,
}

impl FluentCrypt {
    /// Loads rules from `FLUENTCRYPT_RULES` or falls back to the embedded
    /// default policy.
    pub fn new() -> Result<Self, RuleLoadError> {
        Ok(FluentCrypt::with_rule_set_arc(Arc::new(load_rules(None)?)))
    }

    /// Loads rules from an explicit file.
    pub fn from_rules_path(path: impl AsRef<Path>) -> Result<Self, RuleLoadError> {
        Ok(FluentCrypt::with_rule_set_arc(Arc::new(load_rules(Some(
            path.as_ref(),
        ))?)))
    }

    /// Uses an already compiled rule set.
    pub fn with_rule_set(rules: RuleSet) -> Self {
        FluentCrypt::with_rule_set_arc(Arc::new(rules))
    }

    fn with_rule_set_arc(rules: Arc<RuleSet>) -> Self {
        FluentCrypt {
            rules,
            random: Arc::new(OsRandom),
        }
    }

    /// Replaces the randomness source. Exists for deterministic tests of
    /// the layers above; production code has no reason to call it.
    #[doc(hidden)]
    pub fn with_random_source(mut self, random: Arc<dyn RandomSource>) -> Self {
        self.random = random;
        self
    }

    pub fn rules(&self) -> &RuleSet {
        &self.rules
    }

    pub fn encryption(&self) -> TaskBuilder {
        self.builder(BuilderTask::Encrypt)
    }

    pub fn decryption(&self) -> TaskBuilder {
        self.builder(BuilderTask::Decrypt)
    }

    pub fn hashing(&self) -> TaskBuilder {
        self.builder(BuilderTask::Hash)
    }

    pub fn keypair(&self) -> TaskBuilder {
        self.builder(BuilderTask::KeyPair)
    }

    fn builder(&self, task: BuilderTask) -> TaskBuilder {
        TaskBuilder::new(task, Ok(self.rules.clone()), self.random.clone())
    }
}

/// A piece of input data: text to be decoded under the input encoding, or
/// bytes passed through as-is.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DataInput {
    Text(String),
    Bytes(Vec<u8>),
}

impl From<&str> for DataInput {
    fn from(s: &str) -> Self {
        DataInput::Text(s.to_string())
    }
}

impl From<String> for DataInput {
    fn from(s: String) -> Self {
        DataInput::Text(s)
    }
}

impl From<&[u8]> for DataInput {
    fn from(b: &[u8]) -> Self {
        DataInput::Bytes(b.to_vec())
    }
}

impl From<Vec<u8>> for DataInput {
    fn from(b: Vec<u8>) -> Self {
        DataInput::Bytes(b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BuilderTask {
    Encrypt,
    Decrypt,
    Hash,
    KeyPair,
}

/// Accumulates the caller's intent for one crypto task.
///
/// All methods move the builder, so a chain reads top to bottom and a
/// consumed builder cannot be reused. Nothing is checked until
/// [`run`](TaskBuilder::run); configuration calls can come in any order.
pub struct TaskBuilder {
    task: BuilderTask,
    rules: Result<Arc<RuleSet>, RuleLoadError>,
    random: Arc<dyn RandomSource>,
    segments: Vec<DataInput>,
    algorithm: Option<String>,
    symmetric_requested: bool,
    asymmetric_requested: bool,
    user_key: Option<SecretBytes>,
    user_iv: Option<Vec<u8>>,
    kdf_password: Option<SecretBytes>,
    kdf_salt: Option<Vec<u8>>,
    kdf_iterations: Option<u32>,
    kdf_digest: Option<String>,
    in_encoding: Option<Encoding>,
    out_encoding: Option<Encoding>,
    modulus_length: Option<u64>,
    public_key_pem: Option<String>,
    private_key_pem: Option<String>,
    usage_errors: Vec<String>,
}

impl TaskBuilder {
    fn new(
        task: BuilderTask,
        rules: Result<Arc<RuleSet>, RuleLoadError>,
        random: Arc<dyn RandomSource>,
    ) -> Self {
        TaskBuilder {
            task,
            rules,
            random,
            segments: Vec::new(),
            algorithm: None,
            symmetric_requested: false,
            asymmetric_requested: false,
            user_key: None,
            user_iv: None,
            kdf_password: None,
            kdf_salt: None,
            kdf_iterations: None,
            kdf_digest: None,
            in_encoding: None,
            out_encoding: None,
            modulus_length: None,
            public_key_pem: None,
            private_key_pem: None,
            usage_errors: Vec::new(),
        }
    }

    fn usage(mut self, message: impl Into<String>) -> Self {
        self.usage_errors.push(message.into());
        self
    }

    /// Appends input data. Multiple calls concatenate in call order at
    /// `run()`, so a message can be built up piece by piece.
    pub fn data(mut self, segment: impl Into<DataInput>) -> Self {
        self.segments.push(segment.into());
        self
    }

    /// Chooses the symmetric cipher, overriding the default (the first
    /// algorithm the rules allow). The choice is validated at `run()`.
    pub fn with_cipher(mut self, algorithm: impl Into<String>) -> Self {
        if self.task == BuilderTask::Hash || self.task == BuilderTask::KeyPair {
            return self.usage("with_cipher applies to encryption and decryption tasks only");
        }
        self.symmetric_requested = true;
        self.algorithm = Some(algorithm.into());
        self
    }

    /// Chooses the hash algorithm, overriding the default.
    pub fn with_hash(mut self, algorithm: impl Into<String>) -> Self {
        if self.task != BuilderTask::Hash {
            return self.usage("with_hash applies to hashing tasks only");
        }
        self.algorithm = Some(algorithm.into());
        self
    }

    /// Derives the symmetric key from a password at `run()`: PBKDF2 with a
    /// fresh random salt of at least the rules' minimum length and the
    /// rules' minimum iteration count.
    pub fn with_cipher_from_password(mut self, password: impl AsRef<[u8]>) -> Self {
        if self.task == BuilderTask::Hash || self.task == BuilderTask::KeyPair {
            return self
                .usage("with_cipher_from_password applies to encryption and decryption only");
        }
        self.symmetric_requested = true;
        self.kdf_password = Some(SecretBytes::new(password.as_ref().to_vec()));
        self
    }

    /// Uses a key the caller already has. Its length is validated at
    /// `run()`; whether it was generated securely cannot be checked, which
    /// the result notes.
    pub fn with_cipher_from_symmetric_key(self, key: impl AsRef<[u8]>) -> Self {
        self.set_key(key)
    }

    /// Uses the given key for a symmetric task, overwriting any default.
    pub fn set_key(mut self, key: impl AsRef<[u8]>) -> Self {
        if self.task == BuilderTask::Hash || self.task == BuilderTask::KeyPair {
            return self.usage("set_key applies to encryption and decryption tasks only");
        }
        self.symmetric_requested = true;
        self.user_key = Some(SecretBytes::new(key.as_ref().to_vec()));
        self
    }

    /// Uses the given IV, overwriting the per-run fresh default. The length
    /// is validated against the rules at `run()`.
    pub fn set_iv(mut self, iv: impl AsRef<[u8]>) -> Self {
        if self.task == BuilderTask::Hash || self.task == BuilderTask::KeyPair {
            return self.usage("set_iv applies to encryption and decryption tasks only");
        }
        self.symmetric_requested = true;
        self.user_iv = Some(iv.as_ref().to_vec());
        self
    }

    /// Alias for [`set_key`](TaskBuilder::set_key), reading better on the
    /// decryption side.
    pub fn key(self, key: impl AsRef<[u8]>) -> Self {
        self.set_key(key)
    }

    /// Alias for [`set_iv`](TaskBuilder::set_iv), reading better on the
    /// decryption side.
    pub fn iv(self, iv: impl AsRef<[u8]>) -> Self {
        self.set_iv(iv)
    }

    /// Sets the password the key is derived from. Any directly set key is
    /// discarded: derivation settings always win, so call order stays
    /// irrelevant.
    pub fn set_key_generation_password(mut self, password: impl AsRef<[u8]>) -> Self {
        if self.task == BuilderTask::Hash || self.task == BuilderTask::KeyPair {
            return self
                .usage("set_key_generation_password applies to encryption and decryption only");
        }
        self.symmetric_requested = true;
        self.kdf_password = Some(SecretBytes::new(password.as_ref().to_vec()));
        self
    }

    /// Sets the key-derivation salt, overriding the fresh random default.
    /// Needed on the decryption side to re-derive the same key.
    pub fn set_key_generation_salt(mut self, salt: impl AsRef<[u8]>) -> Self {
        if self.task == BuilderTask::Hash || self.task == BuilderTask::KeyPair {
            return self.usage("set_key_generation_salt applies to encryption and decryption only");
        }
        self.symmetric_requested = true;
        self.kdf_salt = Some(salt.as_ref().to_vec());
        self
    }

    /// Sets the key-derivation iteration count, overriding the rules'
    /// minimum (the default). Values below the minimum are rejected at
    /// `run()`.
    pub fn set_key_generation_iterations(mut self, iterations: u32) -> Self {
        if self.task == BuilderTask::Hash || self.task == BuilderTask::KeyPair {
            return self
                .usage("set_key_generation_iterations applies to encryption and decryption only");
        }
        self.symmetric_requested = true;
        self.kdf_iterations = Some(iterations);
        self
    }

    /// Sets the digest the key derivation runs on (default `sha256`).
    pub fn set_symmetric_key_generation_algorithm(mut self, digest: impl Into<String>) -> Self {
        if self.task == BuilderTask::Hash || self.task == BuilderTask::KeyPair {
            return self.usage(
                "set_symmetric_key_generation_algorithm applies to encryption and decryption only",
            );
        }
        self.symmetric_requested = true;
        self.kdf_digest = Some(digest.into());
        self
    }

    /// How text input is decoded into bytes. Defaults: `utf8` for
    /// encryption and hashing, `hex` for decryption.
    pub fn input_encoding(mut self, encoding: Encoding) -> Self {
        self.in_encoding = Some(encoding);
        self
    }

    /// How output bytes are encoded. Defaults: `hex` for encryption and
    /// hashing, `utf8` for decryption.
    pub fn output_encoding(mut self, encoding: Encoding) -> Self {
        self.out_encoding = Some(encoding);
        self
    }

    /// Switches an encryption/decryption task to RSA. Supplying a key with
    /// [`public_key`](TaskBuilder::public_key) or
    /// [`private_key`](TaskBuilder::private_key) implies this.
    pub fn asymmetric(mut self) -> Self {
        if self.task == BuilderTask::Hash || self.task == BuilderTask::KeyPair {
            return self.usage("asymmetric applies to encryption and decryption tasks only");
        }
        self.asymmetric_requested = true;
        self
    }

    /// Supplies the public half of a key pair (PEM). Encrypting with it
    /// uses OAEP; decrypting with it expects data encrypted by the private
    /// key.
    pub fn public_key(mut self, pem: impl Into<String>) -> Self {
        if self.task == BuilderTask::Hash || self.task == BuilderTask::KeyPair {
            return self.usage("public_key applies to encryption and decryption tasks only");
        }
        self.asymmetric_requested = true;
        self.public_key_pem = Some(pem.into());
        self
    }

    /// Supplies the private half of a key pair (PEM). Encrypting with it
    /// produces data anyone with the public key can open; decrypting with
    /// it expects OAEP data made with the public key.
    pub fn private_key(mut self, pem: impl Into<String>) -> Self {
        if self.task == BuilderTask::Hash || self.task == BuilderTask::KeyPair {
            return self.usage("private_key applies to encryption and decryption tasks only");
        }
        self.asymmetric_requested = true;
        self.private_key_pem = Some(pem.into());
        self
    }

    /// Modulus size in bytes for key-pair generation, overriding the
    /// default (the first size the rules allow).
    pub fn set_modulus_length(mut self, bytes: u64) -> Self {
        if self.task != BuilderTask::KeyPair {
            return self.usage("set_modulus_length applies to key-pair generation only");
        }
        self.modulus_length = Some(bytes);
        self
    }

    /// Resolves defaults, validates the complete configuration against the
    /// rules, and executes the task — in that order. On a rule violation
    /// nothing is executed and every violation is reported.
    pub fn run(self) -> Result<RunResult, Error> {
        if let Some(message) = self.usage_errors.first() {
            return Err(Error::Usage(message.clone()));
        }
        let rules = self.rules.clone().map_err(Error::Rules)?;
        match self.effective_task()? {
            TaskKind::Hash => self.run_hash(rules),
            TaskKind::SymmetricEncrypt => self.run_symmetric(rules, true),
            TaskKind::SymmetricDecrypt => self.run_symmetric(rules, false),
            TaskKind::AsymmetricEncrypt => self.run_asymmetric(rules, true),
            TaskKind::AsymmetricDecrypt => self.run_asymmetric(rules, false),
            TaskKind::KeyPairGen => self.run_keypair_gen(rules),
        }
    }

    fn effective_task(&self) -> Result<TaskKind, Error> {
        match self.task {
            BuilderTask::Hash => Ok(TaskKind::Hash),
            BuilderTask::KeyPair => Ok(TaskKind::KeyPairGen),
            BuilderTask::Encrypt | BuilderTask::Decrypt => {
                if self.asymmetric_requested && self.symmetric_requested {
                    return Err(Error::Usage(
                        "both symmetric settings (cipher/key/iv/key generation) and asymmetric \
                         settings (public_key/private_key/asymmetric) were given; pick one mode"
                            .to_string(),
                    ));
                }
                Ok(match (self.task, self.asymmetric_requested) {
                    (BuilderTask::Encrypt, false) => TaskKind::SymmetricEncrypt,
                    (BuilderTask::Encrypt, true) => TaskKind::AsymmetricEncrypt,
                    (BuilderTask::Decrypt, false) => TaskKind::SymmetricDecrypt,
                    (BuilderTask::Decrypt, true) => TaskKind::AsymmetricDecrypt,
                    _ => unreachable!(),
                })
            }
        }
    }

    fn encodings(&self, task: TaskKind) -> (Sourced<Encoding>, Sourced<Encoding>) {
        let (default_in, default_out) = crate::rules::default_encodings(task);
        let input = match self.in_encoding {
            Some(e) => Sourced::user(e),
            None => Sourced::engine(default_in),
        };
        let output = match self.out_encoding {
            Some(e) => Sourced::user(e),
            None => Sourced::engine(default_out),
        };
        (input, output)
    }

    fn ensure_has_data(&self) -> Result<(), Error> {
        if self.segments.is_empty() {
            return Err(Error::MissingInput {
                field: "data",
                hint: "call data(...) with the input to process".to_string(),
            });
        }
        Ok(())
    }

    /// Decodes and concatenates the data segments.
    fn payload(&self, encoding: Encoding, decrypting: bool) -> Result<Vec<u8>, Error> {
        self.ensure_has_data()?;
        let mut bytes = Vec::new();
        for segment in &self.segments {
            match segment {
                DataInput::Text(text) => bytes.extend(decode_text(encoding, text)?),
                DataInput::Bytes(raw) => bytes.extend_from_slice(raw),
            }
        }
        let cap = if decrypting {
            MAX_CIPHERTEXT_BYTES
        } else {
            MAX_PAYLOAD_BYTES
        };
        if bytes.len() > cap {
            return Err(Error::Usage(format!(
                "input is {} bytes but one run handles at most {MAX_PAYLOAD_BYTES} bytes in \
                 this version; split the data or use a streaming tool",
                bytes.len()
            )));
        }
        Ok(bytes)
    }

    fn resolve_algorithm(
        &self,
        rules: &RuleSet,
        task: TaskKind,
    ) -> (Option<Sourced<String>>, Vec<Violation>) {
        if let Some(algorithm) = &self.algorithm {
            return (Some(Sourced::user(algorithm.clone())), Vec::new());
        }
        match rules.default_algorithm(task) {
            Ok(algorithm) => (Some(Sourced::engine(algorithm.to_string())), Vec::new()),
            // Leave the field empty; validation reports the missing section
            // or empty whitelist in rule terms.
            Err(RuleQueryError::NoRulesForTask { .. }) => (None, Vec::new()),
            Err(RuleQueryError::NoDefaultAlgorithm { class }) => (
                None,
                vec![Violation {
                    field: "algorithm".to_string(),
                    offending: "nothing (no algorithm configured)".to_string(),
                    allowed: format!("nothing: section '{class}' lists no algorithms"),
                    hint: "Add an ALGORITHM whitelist to the section so a secure default \
                           exists."
                        .to_string(),
                    rule_location: None,
                }],
            ),
            Err(_) => (None, Vec::new()),
        }
    }

    fn run_hash(self, rules: Arc<RuleSet>) -> Result<RunResult, Error> {
        let task = TaskKind::Hash;
        self.ensure_has_data()?;
        let (input_encoding, output_encoding) = self.encodings(task);

        let mut config = CryptoConfig::new(task);
        let (algorithm, pre_violations) = self.resolve_algorithm(&rules, task);
        config.algorithm = algorithm;
        config.input_encoding = input_encoding;
        config.output_encoding = output_encoding;

        let ok = finish_validation(&rules, &config, pre_violations)?;
        let payload = self.payload(config.input_encoding.value, false)?;
        let algorithm = config.algorithm.as_ref().expect("validated").value.clone();
        let digest = hash_bytes(&payload, &algorithm)?;
        let output = encode_bytes(config.output_encoding.value, &digest)?;
        Ok(RunResult {
            task,
            output,
            algorithm,
            key_hex: None,
            iv_hex: None,
            salt_hex: None,
            notes: ok.notes,
            key_pair: None,
            rules,
            config,
        })
    }

    fn run_symmetric(self, rules: Arc<RuleSet>, encrypting: bool) -> Result<RunResult, Error> {
        let task = if encrypting {
            TaskKind::SymmetricEncrypt
        } else {
            TaskKind::SymmetricDecrypt
        };
        let (input_encoding, output_encoding) = self.encodings(task);

        let kdf_requested = self.kdf_password.is_some()
            || self.kdf_salt.is_some()
            || self.kdf_iterations.is_some()
            || self.kdf_digest.is_some();

        // Missing-input checks come before rule evaluation: they are about
        // the program, not the policy.
        self.ensure_has_data()?;
        if kdf_requested && self.kdf_password.is_none() {
            return Err(Error::MissingInput {
                field: "password",
                hint: "key-generation settings were given without a password; call \
                       set_key_generation_password(...) or with_cipher_from_password(...)"
                    .to_string(),
            });
        }
        if !encrypting {
            if self.user_key.is_none() && !kdf_requested {
                return Err(Error::MissingInput {
                    field: "key",
                    hint: "decryption needs the key from the encrypting side: call key(...) \
                           with its bytes, or re-derive it with \
                           with_cipher_from_password(...) plus set_key_generation_salt(...)"
                        .to_string(),
                });
            }
            if kdf_requested && self.kdf_salt.is_none() {
                return Err(Error::MissingInput {
                    field: "salt",
                    hint: "re-deriving the key for decryption needs the salt from the \
                           encrypting side; call set_key_generation_salt(...) with the value \
                           from salt_hex()"
                        .to_string(),
                });
            }
            if self.user_iv.is_none() {
                return Err(Error::MissingInput {
                    field: "iv",
                    hint: "decryption needs the IV from the encrypting side: call iv(...) \
                           with the value from iv_hex()"
                        .to_string(),
                });
            }
        }

        let mut config = CryptoConfig::new(task);
        let (algorithm, mut pre_violations) = self.resolve_algorithm(&rules, task);
        config.algorithm = algorithm;
        config.input_encoding = input_encoding;
        config.output_encoding = output_encoding;
        let algorithm_name = config
            .algorithm
            .as_ref()
            .map(|a| a.value.clone())
            .unwrap_or_default();
        let cipher_class = rules.class_for_task(task);

        // Key plan. Derivation settings win over a set key; with neither,
        // encryption generates a fresh key of the rule-given length.
        if kdf_requested {
            let password = self.kdf_password.clone().expect("checked above");
            let salt = match &self.kdf_salt {
                Some(salt) => salt.clone(),
                None => {
                    let min = cipher_class
                        .and_then(|c| c.min_salt_length())
                        .unwrap_or(FALLBACK_SALT_LENGTH);
                    self.fresh_bytes(min.max(FALLBACK_SALT_LENGTH) as usize)
                }
            };
            let iterations = self.kdf_iterations.unwrap_or_else(|| {
                cipher_class
                    .and_then(|c| c.min_iterations())
                    .map(|min| u32::try_from(min).unwrap_or(u32::MAX))
                    .unwrap_or(FALLBACK_ITERATIONS)
            });
            let digest = self
                .kdf_digest
                .clone()
                .unwrap_or_else(|| DEFAULT_KDF_DIGEST.to_string());
            // An unresolvable length shows up in validation as the missing
            // key rule; zero is never a real derivable length.
            let derived_length = rules.required_key_length(&algorithm_name).unwrap_or(0);
            let params = KdfParams {
                password,
                salt,
                iterations,
                digest,
                derived_length,
            };
            config.kdf = Some(if self.kdf_salt.is_some()
                || self.kdf_iterations.is_some()
                || self.kdf_digest.is_some()
            {
                Sourced::user(params)
            } else {
                Sourced::engine(params)
            });
        } else if let Some(key) = &self.user_key {
            config.key = Some(Sourced::user(key.clone()));
        } else if encrypting {
            match rules.required_key_length(&algorithm_name) {
                Ok(length) => {
                    config.key =
                        Some(Sourced::engine(SecretBytes::new(self.fresh_bytes(length as usize))));
                }
                Err(e) => pre_violations.push(no_rule_violation("key", &algorithm_name, &e)),
            }
        }

        if let Some(iv) = &self.user_iv {
            config.iv = Some(Sourced::user(iv.clone()));
        } else if encrypting {
            // A fresh IV for every encryption; never cached, never reused.
            match rules.required_iv_length(&algorithm_name) {
                Ok(length) => {
                    config.iv = Some(Sourced::engine(self.fresh_bytes(length as usize)));
                }
                Err(e) => pre_violations.push(no_rule_violation("iv", &algorithm_name, &e)),
            }
        }

        let ok = finish_validation(&rules, &config, pre_violations)?;
        let payload = self.payload(config.input_encoding.value, !encrypting)?;

        // Execution. Derive the key now if a derivation was planned — after
        // validation, so rejected parameters never reach the KDF.
        let (key, salt_hex) = match (&config.key, &config.kdf) {
            (Some(key), _) => (key.value.clone(), None),
            (None, Some(kdf)) => {
                let params = &kdf.value;
                let derived = derive_key(
                    params.password.as_bytes(),
                    &params.salt,
                    params.iterations,
                    &params.digest,
                    params.derived_length,
                )?;
                (
                    SecretBytes::new(derived.bytes().to_vec()),
                    Some(hex::encode(&params.salt)),
                )
            }
            (None, None) => unreachable!("validated configs have a key or a derivation plan"),
        };
        let iv = config.iv.as_ref().expect("validated").value.clone();

        let result_bytes = if encrypting {
            symmetric_encrypt(&algorithm_name, key.as_bytes(), &iv, &payload)?
        } else {
            symmetric_decrypt(&algorithm_name, key.as_bytes(), &iv, &payload)?
        };
        let output = encode_bytes(config.output_encoding.value, &result_bytes)?;

        let mut notes = ok.notes;
        if config.kdf.is_some() {
            notes.push(
                "key derived from a password; keep the salt (salt_hex) to re-derive it for \
                 decryption"
                    .to_string(),
            );
        }
        Ok(RunResult {
            task,
            output,
            algorithm: algorithm_name,
            key_hex: Some(key.to_hex()),
            iv_hex: Some(hex::encode(&iv)),
            salt_hex,
            notes,
            key_pair: None,
            rules,
            config,
        })
    }

    fn run_asymmetric(self, rules: Arc<RuleSet>, encrypting: bool) -> Result<RunResult, Error> {
        let task = if encrypting {
            TaskKind::AsymmetricEncrypt
        } else {
            TaskKind::AsymmetricDecrypt
        };
        let (input_encoding, output_encoding) = self.encodings(task);
        self.ensure_has_data()?;

        let key = match (&self.public_key_pem, &self.private_key_pem) {
            (Some(_), Some(_)) => {
                return Err(Error::Usage(
                    "both public_key and private_key were supplied; give exactly one and the \
                     direction follows from it"
                        .to_string(),
                ))
            }
            (Some(pem), None) => AsymmetricKey::from_public_pem(pem)?,
            (None, Some(pem)) => AsymmetricKey::from_private_pem(pem)?,
            (None, None) => {
                return Err(Error::MissingInput {
                    field: "key",
                    hint: "asymmetric tasks need exactly one key: public_key(...) or \
                           private_key(...)"
                        .to_string(),
                })
            }
        };

        let mut config = CryptoConfig::new(task);
        config.algorithm = Some(Sourced::engine("rsa".to_string()));
        config.input_encoding = input_encoding;
        config.output_encoding = output_encoding;
        config.modulus_length = Some(Sourced::user(key.modulus_length()));

        let ok = finish_validation(&rules, &config, Vec::new())?;
        let payload = self.payload(config.input_encoding.value, !encrypting)?;

        let padding = match (&key, encrypting) {
            (AsymmetricKey::Public(_), true) => RsaPadding::Oaep,
            (AsymmetricKey::Private(_), true) => RsaPadding::Pkcs1v15,
            (AsymmetricKey::Private(_), false) => RsaPadding::Oaep,
            (AsymmetricKey::Public(_), false) => RsaPadding::Pkcs1v15,
        };
        let result_bytes = if encrypting {
            asymmetric_encrypt(self.random.as_ref(), &key, padding, &payload)?
        } else {
            asymmetric_decrypt(&key, padding, &payload)?
        };
        let output = encode_bytes(config.output_encoding.value, &result_bytes)?;
        Ok(RunResult {
            task,
            output,
            algorithm: "rsa".to_string(),
            key_hex: None,
            iv_hex: None,
            salt_hex: None,
            notes: ok.notes,
            key_pair: None,
            rules,
            config,
        })
    }

    fn run_keypair_gen(self, rules: Arc<RuleSet>) -> Result<RunResult, Error> {
        let task = TaskKind::KeyPairGen;
        if !self.segments.is_empty() {
            return Err(Error::Usage(
                "key-pair generation takes no input data".to_string(),
            ));
        }
        let mut config = CryptoConfig::new(task);
        config.algorithm = Some(Sourced::engine("rsa".to_string()));
        let mut pre_violations = Vec::new();
        match self.modulus_length {
            Some(bytes) => config.modulus_length = Some(Sourced::user(bytes)),
            None => match rules.default_modulus_length() {
                Ok(bytes) => config.modulus_length = Some(Sourced::engine(bytes)),
                Err(RuleQueryError::NoRulesForTask { .. }) => {}
                Err(e) => pre_violations.push(no_rule_violation("modulus_length", "rsa", &e)),
            },
        }

        let ok = finish_validation(&rules, &config, pre_violations)?;
        let modulus = config.modulus_length.as_ref().expect("validated").value;
        let pair = generate_keypair(self.random.as_ref(), modulus)?;
        Ok(RunResult {
            task,
            output: crate::primitives::Output::Text(pair.public_pem().to_string()),
            algorithm: "rsa".to_string(),
            key_hex: None,
            iv_hex: None,
            salt_hex: None,
            notes: ok.notes,
            key_pair: Some(pair),
            rules,
            config,
        })
    }

    fn fresh_bytes(&self, n: usize) -> Vec<u8> {
        let mut bytes = vec![0u8; n];
        self.random.fill_bytes(&mut bytes);
        bytes
    }
}

/// Merges resolution-time violations with full validation, deduplicating
/// identical findings. Nothing executes unless this returns `Ok`.
fn finish_validation(
    rules: &RuleSet,
    config: &CryptoConfig,
    mut violations: Vec<Violation>,
) -> Result<ValidationOk, Error> {
    match rules.validate_config(config) {
        Ok(ok) if violations.is_empty() => Ok(ok),
        Ok(_) => Err(Error::Violations(violations)),
        Err(more) => {
            for violation in more {
                if !violations.contains(&violation) {
                    violations.push(violation);
                }
            }
            Err(Error::Violations(violations))
        }
    }
}

/// A violation for a default that could not be derived because no rule
/// covers it; phrased like the validator's own no-rule findings.
fn no_rule_violation(field: &str, algorithm: &str, error: &RuleQueryError) -> Violation {
    Violation {
        field: field.to_string(),
        offending: "nothing (the engine would have to pick a size)".to_string(),
        allowed: format!("nothing: {error}"),
        hint: format!(
            "Without a covering rule no {field} can be generated or accepted for \
             '{algorithm}'; extend the rule file or use a covered algorithm."
        ),
        rule_location: None,
    }
}
