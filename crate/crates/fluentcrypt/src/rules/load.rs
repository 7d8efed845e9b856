//! Loading the rules in force: an explicit path wins, then the
//! `FLUENTCRYPT_RULES` environment variable, then the policy embedded at
//! build time (a byte-identical copy of `rules/default.cryrule` in the
//! repository).

use super::{compile, RuleSet};
use crate::cryrule::{parse_named, ParseDiagnostic};
use std::fmt;
use std::path::Path;
use thiserror::Error;

/// Environment variable naming the rule file to load when no explicit path
/// is given.
pub const RULES_ENV_VAR: &str = "FLUENTCRYPT_RULES";

const EMBEDDED_RULES: &str = include_str!("../../../../rules/default.cryrule");
const EMBEDDED_NAME: &str = "default.cryrule (embedded)";

#[derive(Debug, Clone, Error)]
pub enum RuleLoadError {
    #[error("cannot read rule file {path}: {detail}")]
    Io { path: String, detail: String },

    #[error("{}", render_parse_failure(.source_name, .diagnostics))]
    Parse {
        source_name: String,
        diagnostics: Vec<ParseDiagnostic>,
    },
}

fn render_parse_failure(source_name: &str, diagnostics: &[ParseDiagnostic]) -> String {
    let mut out = format!("rule file {source_name} has problems:");
    for diagnostic in diagnostics {
        let _ = fmt::Write::write_fmt(&mut out, format_args!("\n  {diagnostic}"));
    }
    out
}

/// The policy text compiled into the library. Kept public so tooling and
/// tests can confirm the file on disk and the embedded copy are identical.
pub fn embedded_default_text() -> &'static str {
    EMBEDDED_RULES
}

/// The embedded default policy, compiled.
pub fn default_rule_set() -> RuleSet {
    let file = parse_named(EMBEDDED_RULES, EMBEDDED_NAME)
        .expect("the embedded rule file always parses; its tests run in this crate");
    compile(file)
}

/// Loads and compiles the rules in force.
///
/// With `Some(path)` that file is used. With `None`, the path in
/// [`RULES_ENV_VAR`] is used if set, otherwise the embedded default policy.
pub fn load_rules(path: Option<&Path>) -> Result<RuleSet, RuleLoadError> {
    let chosen = match path {
        Some(p) => Some(p.to_path_buf()),
        None => std::env::var_os(RULES_ENV_VAR).map(std::path::PathBuf::from),
    };
    let Some(path) = chosen else {
        return Ok(default_rule_set());
    };
    let text = std::fs::read_to_string(&path).map_err(|e| RuleLoadError::Io {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    let source_name = path.display().to_string();
    let file = parse_named(&text, &source_name).map_err(|diagnostics| RuleLoadError::Parse {
        source_name,
        diagnostics,
    })?;
    Ok(compile(file))
}

#[cfg(test)]
mod tests {
    use super::super::TaskKind;
    use super::*;
    use std::io::Write;

    #[test]
    fn embedded_default_compiles_with_expected_defaults() {
        let rules = default_rule_set();
        assert!(rules.warnings().is_empty());
        assert_eq!(
            rules.default_algorithm(TaskKind::SymmetricEncrypt).unwrap(),
            "aes-128-cbc"
        );
        assert_eq!(rules.default_algorithm(TaskKind::Hash).unwrap(), "sha256");
        assert_eq!(rules.default_modulus_length().unwrap(), 384);
        assert_eq!(rules.required_key_length("aes-128-cbc").unwrap(), 16);
        assert_eq!(rules.required_iv_length("aes-128-cbc").unwrap(), 16);
    }

    #[test]
    fn explicit_path_wins() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        write!(file, "Hash ALGORITHM sha512").unwrap();
        let rules = load_rules(Some(file.path())).unwrap();
        assert_eq!(rules.default_algorithm(TaskKind::Hash).unwrap(), "sha512");
        assert!(rules.class("Cipher").is_none());
    }

    #[test]
    fn missing_file_is_an_io_error() {
        let err = load_rules(Some(Path::new("/nonexistent/nothing.cryrule"))).unwrap_err();
        assert!(matches!(err, RuleLoadError::Io { .. }));
    }

    #[test]
    fn malformed_file_reports_diagnostics() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        write!(file, "Cipher ALGORITHM IN []").unwrap();
        let err = load_rules(Some(file.path())).unwrap_err();
        let RuleLoadError::Parse { diagnostics, .. } = &err else {
            panic!("expected a parse error, got {err:?}");
        };
        assert!(!diagnostics.is_empty());
        assert!(err.to_string().contains("empty algorithm list"));
    }
}
