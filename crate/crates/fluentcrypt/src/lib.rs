//! fluentcrypt — cryptography with the decisions taken out.
//!
//! A secure-by-default facade over hashing, symmetric and asymmetric
//! encryption. What the library will and will not do is governed by an
//! external rule file that security experts maintain; developers state the
//! task and the library fills in expert-approved defaults, validates every
//! caller-supplied value before anything executes, and explains violations
//! with the rule that was broken and how to fix it.
//!
//! ```
//! let sealed = fluentcrypt::encryption()
//!     .data("some plain text")
//!     .run()?;
//!
//! let opened = fluentcrypt::decryption()
//!     .data(sealed.output_text().unwrap())
//!     .with_cipher(sealed.algorithm())
//!     .key(hex::decode(sealed.key_hex().unwrap()).unwrap())
//!     .iv(hex::decode(sealed.iv_hex().unwrap()).unwrap())
//!     .run()?;
//!
//! assert_eq!(opened.output_text(), Some("some plain text"));
//! # Ok::<(), fluentcrypt::Error>(())
//! ```
//!
//! The zero-configuration run above used the first algorithm the rules
//! allow, a fresh random key of the rule-given size and a fresh IV — and
//! handed them back through getters so the decrypting side can do its job.
//!
//! Insecure configurations do not run:
//!
//! ```
//! let err = fluentcrypt::encryption()
//!     .data("payload")
//!     .with_cipher("des")
//!     .run()
//!     .unwrap_err();
//! let text = err.to_string();
//! assert!(text.contains("des"));
//! assert!(text.contains("aes-128-cbc")); // the allowed algorithms, by name
//! ```
//!
//! # Layers
//!
//! * [`cryrule`] — the rule language: lexer, parser, canonical printer.
//! * [`rules`] — compiled rule sets: defaults, validation, guided errors.
//! * [`primitives`] — thin adapters over the actual crypto.
//! * [`builder`] — the fluent, task-oriented entry points re-exported at
//!   the crate root.
//!
//! Rules come from the `FLUENTCRYPT_RULES` environment variable when set,
//! otherwise from the policy embedded at build time (`rules/default.cryrule`
//! in the repository). [`FluentCrypt`] binds tasks to an explicit rule set
//! instead.

pub mod builder;
pub mod cryrule;
mod error;
pub mod primitives;
pub mod rules;
mod secret;
#[doc(hidden)]
pub mod testing;

pub use builder::{
    decryption, encryption, hashing, keypair, DataInput, FluentCrypt, RunResult, TaskBuilder,
    MAX_PAYLOAD_BYTES,
};
pub use error::Error;
pub use primitives::{Encoding, Output};
pub use rules::{
    compile, explain, load_rules, CryptoConfig, Provenance, RuleSet, TaskKind, Violation,
    RULES_ENV_VAR,
};
pub use secret::SecretBytes;

#[cfg(doctest)]
mod book;
