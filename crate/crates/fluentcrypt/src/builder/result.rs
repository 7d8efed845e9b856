//! What a finished task hands back.

use crate::primitives::{KeyPair, Output};
use crate::rules::{CryptoConfig, RuleSet, TaskKind};
use std::sync::Arc;

/// The outcome of [`TaskBuilder::run`](crate::TaskBuilder::run): the output
/// plus everything needed to reverse or audit the operation — the algorithm
/// that ran, and hex getters for the key, IV and salt that were actually
/// used. Those getters are how material generated on the encrypting side
/// reaches the decrypting side.
#[derive(Clone)]
pub struct RunResult {
    pub(crate) task: TaskKind,
    pub(crate) output: Output,
    pub(crate) algorithm: String,
    pub(crate) key_hex: Option<String>,
    pub(crate) iv_hex: Option<String>,
    pub(crate) salt_hex: Option<String>,
    pub(crate) notes: Vec<String>,
    pub(crate) key_pair: Option<KeyPair>,
    pub(crate) rules: Arc<RuleSet>,
    pub(crate) config: CryptoConfig,
}

impl RunResult {
    pub fn task(&self) -> TaskKind {
        self.task
    }

    /// The main output: encoded text, or raw bytes under the raw encoding.
    pub fn output(&self) -> &Output {
        &self.output
    }

    pub fn into_output(self) -> Output {
        self.output
    }

    /// The output as text, when the output encoding produces text.
    pub fn output_text(&self) -> Option<&str> {
        self.output.as_text()
    }

    pub fn output_bytes(&self) -> &[u8] {
        self.output.as_bytes()
    }

    /// The algorithm that actually ran (configured or default).
    pub fn algorithm(&self) -> &str {
        &self.algorithm
    }

    /// Hex of the symmetric key that was used; needed to decrypt later.
    pub fn key_hex(&self) -> Option<&str> {
        self.revalidate();
        self.key_hex.as_deref()
    }

    /// Hex of the IV that was used; needed to decrypt later.
    pub fn iv_hex(&self) -> Option<&str> {
        self.revalidate();
        self.iv_hex.as_deref()
    }

    /// Hex of the salt the key was derived with, when a password path was
    /// used; needed to re-derive the key for decryption.
    pub fn salt_hex(&self) -> Option<&str> {
        self.revalidate();
        self.salt_hex.as_deref()
    }

    /// Caveats attached by validation, e.g. that a user-supplied key could
    /// only be checked for length.
    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    /// The generated key pair, for key-pair generation tasks.
    pub fn key_pair(&self) -> Option<&KeyPair> {
        self.key_pair.as_ref()
    }

    /// The rule set this result was produced under.
    pub fn rule_set(&self) -> &RuleSet {
        &self.rules
    }

    #[doc(hidden)]
    pub fn effective_config(&self) -> &CryptoConfig {
        &self.config
    }

    // Getter values stay tied to the rules they were produced under; both
    // are immutable, so this can only fail if an invariant is broken
    // internally.
    fn revalidate(&self) {
        self.rules
            .validate_config(&self.config)
            .expect("result no longer satisfies the rule set it was produced under");
    }
}

impl std::fmt::Debug for RunResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RunResult")
            .field("task", &self.task)
            .field("algorithm", &self.algorithm)
            .field("output", &format_args!("<{} bytes>", self.output.as_bytes().len()))
            .field("key", &self.key_hex.as_ref().map(|k| format!("<{} hex chars>", k.len())))
            .field("iv", &self.iv_hex)
            .field("salt", &self.salt_hex)
            .field("notes", &self.notes)
            .finish()
    }
}
