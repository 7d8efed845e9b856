//! The rule language: constraint files that security experts write to
//! whitelist crypto configurations.
//!
//! A rule file (conventionally `*.cryrule`, UTF-8) contains sections named
//! after task classes (`Cipher`, `Hash`, `KeyPair`), each holding ordered
//! constraint clauses:
//!
//! ```text
//! Cipher
//! ALGORITHM IN [aes-128-cbc, aes-128-gcm]
//! IV
//! LENGTH 16 IF ALGORITHM aes-128-cbc
//! LENGTH 12 IF ALGORITHM aes-128-gcm
//! SymmetricKey
//! LENGTH 16
//! ITERATIONS >= 10000
//! SALTLENGTH >= 20
//! ```
//!
//! Everything not explicitly allowed is rejected at validation time, and the
//! first value of every constraint doubles as the secure default. Keywords
//! are case-insensitive and whitespace never matters; lines starting with
//! `#` are comments. All functions here are pure and thread-safe.

mod ast;
mod diagnostics;
mod parser;
mod token;
mod unparse;

pub use ast::{
    AlgorithmCondition, AlgorithmWhitelist, BoundClause, ConditionalLength, Constraint, IvBlock,
    RuleFile, Section, Span, SymmetricKeyBlock,
};
pub use diagnostics::{ParseDiagnostic, Severity};
pub use parser::{parse, parse_named};
pub use token::{tokenize, Token, TokenKind};
pub use unparse::unparse;
