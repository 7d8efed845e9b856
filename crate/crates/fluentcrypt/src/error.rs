//! The crate-level error type.

use crate::primitives::{CryptoError, EncodingError};
use crate::rules::{RuleLoadError, Violation};
use std::fmt;
use thiserror::Error;

/// Anything that can stop a fluent task from producing a result.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// The rules in force could not be loaded or parsed.
    #[error(transparent)]
    Rules(#[from] RuleLoadError),

    /// A required input was never supplied.
    #[error("missing input '{field}': {hint}")]
    MissingInput { field: &'static str, hint: String },

    /// The builder was used in a way that cannot be executed (a method for
    /// the wrong task, conflicting settings, oversized payload).
    #[error("{0}")]
    Usage(String),

    /// The configuration broke one or more rules; nothing was executed.
    #[error("{}", render_violations(.0))]
    Violations(Vec<Violation>),

    /// Input or output could not be decoded/encoded as requested.
    #[error(transparent)]
    Encoding(#[from] EncodingError),

    /// A primitive failed (authentication, padding, key parsing, sizes).
    #[error(transparent)]
    Crypto(#[from] CryptoError),
}

fn render_violations(violations: &[Violation]) -> String {
    let mut out = format!(
        "configuration rejected by the crypto rules ({} violation{}):",
        violations.len(),
        if violations.len() == 1 { "" } else { "s" }
    );
    for violation in violations {
        let _ = fmt::Write::write_fmt(&mut out, format_args!("\n  - {violation}"));
    }
    out
}

impl Error {
    /// The violations behind this error, when it is a rule rejection.
    pub fn violations(&self) -> Option<&[Violation]> {
        match self {
            Error::Violations(v) => Some(v),
            _ => None,
        }
    }
}
