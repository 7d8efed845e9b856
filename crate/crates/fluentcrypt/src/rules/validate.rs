//! Validation of an effective configuration against the rules, and the
//! guiding messages produced when it fails.
//!
//! All violations are collected in one pass — a configuration breaking three
//! rules reports three violations, not just the first. Renderings never
//! contain key, password or salt bytes; secret material is described by its
//! length only.

use super::config::{CryptoConfig, Provenance, TaskKind};
use super::{ClassRules, RuleSet, SourceLocation};
use std::fmt;

/// One broken rule: what was wrong, what the rules allow, how to fix it,
/// and where the rule lives in the rule file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// The configuration field at fault (`algorithm`, `iv`, `key`,
    /// `kdf.iterations`, `kdf.salt`, `modulus_length`, `task`).
    pub field: String,
    /// Rendering of the offending value. Secret material is reduced to its
    /// length.
    pub offending: String,
    /// Rendering of what the rules would accept.
    pub allowed: String,
    /// One remediation sentence; never empty.
    pub hint: String,
    /// Position of the violated rule in its rule file, when one exists.
    pub rule_location: Option<SourceLocation>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&explain(self))
    }
}

/// Renders one violation as a single guiding message: the problem, the
/// observed property, the allowed values, a remediation hint and the rule's
/// location in the rule file.
pub fn explain(violation: &Violation) -> String {
    let rule_ref = match &violation.rule_location {
        Some(location) => format!("Rule at {location}."),
        None => "No applicable rule exists in the rule file.".to_string(),
    };
    format!(
        "Rule violation on {}: got {}, allowed: {}. {} {}",
        violation.field, violation.offending, violation.allowed, violation.hint, rule_ref
    )
}

/// A clean validation. `notes` carries caveats worth surfacing even on
/// success, e.g. that a user-supplied key could only be checked for length.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationOk {
    pub notes: Vec<String>,
}

impl RuleSet {
    /// Judges `config` against the rules: `Ok` with optional notes, or every
    /// violation found. Rule breaches are data, not panics — the caller
    /// decides how to surface them.
    pub fn validate_config(&self, config: &CryptoConfig) -> Result<ValidationOk, Vec<Violation>> {
        let mut violations = Vec::new();
        let mut notes = Vec::new();

        let Some(class) = self.class_for_task(config.task) else {
            return Err(vec![Violation {
                field: "task".to_string(),
                offending: format!("a {} task", config.task.label()),
                allowed: format!(
                    "no rules for task: the rule file has no '{}' section",
                    config.task.section_name()
                ),
                hint: format!(
                    "Add a '{}' section to the rule file before using this task.",
                    config.task.section_name()
                ),
                rule_location: None,
            }]);
        };

        self.check_algorithm(class, config, &mut violations);
        if config.task.is_symmetric() {
            self.check_iv(class, config, &mut violations);
            self.check_key(class, config, &mut violations, &mut notes);
            self.check_kdf(class, config, &mut violations);
        }
        self.check_modulus(class, config, &mut violations, &mut notes);

        if violations.is_empty() {
            Ok(ValidationOk { notes })
        } else {
            Err(violations)
        }
    }

    fn check_algorithm(
        &self,
        class: &ClassRules,
        config: &CryptoConfig,
        violations: &mut Vec<Violation>,
    ) {
        let Some(algorithm) = &config.algorithm else {
            return;
        };
        if class.algorithms().is_empty() {
            // No whitelist in this section. The engine may pick its own
            // fixed primitive (e.g. RSA for key pairs), but a caller-chosen
            // name has nothing to be checked against, and unchecked means
            // rejected.
            if algorithm.provenance == Provenance::UserSupplied {
                violations.push(Violation {
                    field: "algorithm".to_string(),
                    offending: format!("'{}'", algorithm.value),
                    allowed: format!(
                        "nothing: section '{}' has no ALGORITHM whitelist",
                        class.class_name()
                    ),
                    hint: "Remove the algorithm override, or add an ALGORITHM whitelist to the \
                           section."
                        .to_string(),
                    rule_location: Some(class.location().clone()),
                });
            }
            return;
        }
        if !class.allows_algorithm(&algorithm.value) {
            violations.push(Violation {
                field: "algorithm".to_string(),
                offending: format!("'{}'", algorithm.value),
                allowed: class.algorithms().join(", "),
                hint: "Pick one of the allowed algorithms, or leave it unset to use the secure \
                       default (the first allowed algorithm)."
                    .to_string(),
                rule_location: class.whitelist_location().cloned(),
            });
        }
    }

    fn check_iv(
        &self,
        class: &ClassRules,
        config: &CryptoConfig,
        violations: &mut Vec<Violation>,
    ) {
        let Some(iv) = &config.iv else {
            return;
        };
        let algorithm = algorithm_name(config);
        match class.iv_rule_for(algorithm) {
            Some(rule) => {
                if !rule.allows(iv.value.len() as u64) {
                    violations.push(Violation {
                        field: "iv".to_string(),
                        offending: format!("a {}-byte IV", iv.value.len()),
                        allowed: format!(
                            "{} bytes for algorithm '{algorithm}'",
                            lengths_text(&rule.lengths)
                        ),
                        hint: "Let the library generate the IV (it picks the right size and \
                               fresh randomness for every run), or supply one of the allowed \
                               size."
                            .to_string(),
                        rule_location: Some(rule.location.clone()),
                    });
                }
            }
            None => violations.push(Violation {
                field: "iv".to_string(),
                offending: format!("a {}-byte IV", iv.value.len()),
                allowed: format!(
                    "nothing: no IV length rule in section '{}' covers algorithm '{algorithm}'",
                    class.class_name()
                ),
                hint: "An IV that no rule covers cannot be verified and is rejected; add an IV \
                       rule for this algorithm or use a covered algorithm."
                    .to_string(),
                rule_location: None,
            }),
        }
    }

    fn check_key(
        &self,
        class: &ClassRules,
        config: &CryptoConfig,
        violations: &mut Vec<Violation>,
        notes: &mut Vec<String>,
    ) {
        let Some(key) = &config.key else {
            return;
        };
        let algorithm = algorithm_name(config);
        match class.key_rule_for(algorithm) {
            Some(rule) => {
                if !rule.allows(key.value.len() as u64) {
                    violations.push(Violation {
                        field: "key".to_string(),
                        offending: format!("a {}-byte key", key.value.len()),
                        allowed: format!(
                            "{} bytes for algorithm '{algorithm}'",
                            lengths_text(&rule.lengths)
                        ),
                        hint: "Provide a key of the allowed size, or let the library generate \
                               or derive one."
                            .to_string(),
                        rule_location: Some(rule.location.clone()),
                    });
                } else if key.provenance == Provenance::UserSupplied {
                    notes.push(
                        "user-supplied key: its length satisfies the rules, but whether it was \
                         generated securely cannot be checked"
                            .to_string(),
                    );
                }
            }
            None => violations.push(Violation {
                field: "key".to_string(),
                offending: format!("a {}-byte key", key.value.len()),
                allowed: format!(
                    "nothing: no key length rule in section '{}' covers algorithm '{algorithm}'",
                    class.class_name()
                ),
                hint: "A key that no rule covers cannot be verified and is rejected; add a \
                       SYMMETRICKEY rule for this algorithm or use a covered algorithm."
                    .to_string(),
                rule_location: None,
            }),
        }
    }

    fn check_kdf(
        &self,
        class: &ClassRules,
        config: &CryptoConfig,
        violations: &mut Vec<Violation>,
    ) {
        let Some(kdf) = &config.kdf else {
            return;
        };
        let params = &kdf.value;
        if let Some(min) = class.min_iterations() {
            if u64::from(params.iterations) < min {
                violations.push(Violation {
                    field: "kdf.iterations".to_string(),
                    offending: format!("{} iterations", params.iterations),
                    allowed: format!("at least {min} iterations"),
                    hint: "Raise the iteration count to the minimum (or omit it to use the \
                           rule minimum automatically)."
                        .to_string(),
                    rule_location: self.iterations_location(class),
                });
            }
        }
        if let Some(min) = class.min_salt_length() {
            if (params.salt.len() as u64) < min {
                violations.push(Violation {
                    field: "kdf.salt".to_string(),
                    offending: format!("a {}-byte salt", params.salt.len()),
                    allowed: format!("at least {min} bytes"),
                    hint: "Use a fresh random salt of at least the minimum length (the library \
                           generates one when you omit it); fixed or short salts defeat the \
                           key derivation."
                        .to_string(),
                    rule_location: self.salt_location(class),
                });
            }
        }
        // The derived key must land on an allowed length. When the engine
        // planned the derivation this holds by construction; a hand-built
        // config can still get it wrong.
        if config.key.is_none() {
            let algorithm = algorithm_name(config);
            match class.key_rule_for(algorithm) {
                Some(rule) if rule.allows(params.derived_length) => {}
                Some(rule) => violations.push(Violation {
                    field: "key".to_string(),
                    offending: format!("a derived key of {} bytes", params.derived_length),
                    allowed: format!(
                        "{} bytes for algorithm '{algorithm}'",
                        lengths_text(&rule.lengths)
                    ),
                    hint: "Derive a key of the allowed size for this algorithm.".to_string(),
                    rule_location: Some(rule.location.clone()),
                }),
                None => violations.push(Violation {
                    field: "key".to_string(),
                    offending: format!("a derived key of {} bytes", params.derived_length),
                    allowed: format!(
                        "nothing: no key length rule in section '{}' covers algorithm \
                         '{algorithm}'",
                        class.class_name()
                    ),
                    hint: "A key that no rule covers cannot be verified and is rejected; add a \
                           SYMMETRICKEY rule for this algorithm or use a covered algorithm."
                        .to_string(),
                    rule_location: None,
                }),
            }
        }
    }

    fn check_modulus(
        &self,
        class: &ClassRules,
        config: &CryptoConfig,
        violations: &mut Vec<Violation>,
        notes: &mut Vec<String>,
    ) {
        let Some(modulus) = &config.modulus_length else {
            return;
        };
        let algorithm = algorithm_name(config);
        match class.length_rule_for(algorithm) {
            Some(rule) => {
                if !rule.allows(modulus.value) {
                    violations.push(Violation {
                        field: "modulus_length".to_string(),
                        offending: format!("a {}-byte modulus", modulus.value),
                        allowed: format!("{} bytes", lengths_text(&rule.lengths)),
                        hint: "Use one of the allowed modulus sizes, or omit it to use the \
                               default (the first allowed size)."
                            .to_string(),
                        rule_location: Some(rule.location.clone()),
                    });
                } else if modulus.provenance == Provenance::UserSupplied
                    && config.task != TaskKind::KeyPairGen
                {
                    notes.push(
                        "user-supplied key pair: its modulus size satisfies the rules, but \
                         whether it was generated securely cannot be checked"
                            .to_string(),
                    );
                }
            }
            None => violations.push(Violation {
                field: "modulus_length".to_string(),
                offending: format!("a {}-byte modulus", modulus.value),
                allowed: format!(
                    "nothing: no LENGTH rule in section '{}' covers key sizes",
                    class.class_name()
                ),
                hint: "Add a LENGTH rule to the section to whitelist modulus sizes."
                    .to_string(),
                rule_location: Some(class.location().clone()),
            }),
        }
    }

    fn iterations_location(&self, class: &ClassRules) -> Option<SourceLocation> {
        class.min_iterations_location().cloned()
    }

    fn salt_location(&self, class: &ClassRules) -> Option<SourceLocation> {
        class.min_salt_length_location().cloned()
    }
}

fn algorithm_name(config: &CryptoConfig) -> &str {
    config
        .algorithm
        .as_ref()
        .map(|a| a.value.as_str())
        .unwrap_or("")
}

fn lengths_text(lengths: &[u64]) -> String {
    match lengths {
        [one] => one.to_string(),
        many => {
            let rendered: Vec<String> = many.iter().map(|n| n.to_string()).collect();
            format!("one of [{}]", rendered.join(", "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::config::{KdfParams, Sourced};
    use super::super::{compile, TaskKind};
    use super::*;
    use crate::cryrule::parse;
    use crate::primitives::Encoding;
    use crate::secret::SecretBytes;

    const CIPHER_RULES: &str = "\
Cipher
ALGORITHM IN [aes-128-cbc, aes-128-gcm, aes-192-cbc, aes-192-gcm, aes-256-cbc, aes-256-gcm]
IV
LENGTH 16 IF ALGORITHM IN [aes-128-cbc, aes-192-cbc, aes-256-cbc]
LENGTH 12 IF ALGORITHM IN [aes-128-gcm, aes-192-gcm, aes-256-gcm]
SymmetricKey
LENGTH 16 IF ALGORITHM IN [aes-128-cbc, aes-128-gcm]
LENGTH 24 IF ALGORITHM IN [aes-192-cbc, aes-192-gcm]
LENGTH 32 IF ALGORITHM IN [aes-256-cbc, aes-256-gcm]
ITERATIONS >= 10000
SALTLENGTH >= 20
";

    fn rules() -> RuleSet {
        compile(parse(CIPHER_RULES).unwrap())
    }

    fn base_config(algorithm: &str) -> CryptoConfig {
        let mut config = CryptoConfig::new(TaskKind::SymmetricEncrypt);
        config.algorithm = Some(Sourced::user(algorithm.to_string()));
        config
    }

    fn kdf(iterations: u32, salt_len: usize) -> KdfParams {
        KdfParams {
            password: SecretBytes::new(b"pw".to_vec()),
            salt: vec![0u8; salt_len],
            iterations,
            digest: "sha256".to_string(),
            derived_length: 16,
        }
    }

    #[test]
    fn blocked_algorithm_reports_the_whitelist() {
        let violations = rules().validate_config(&base_config("des")).unwrap_err();
        assert_eq!(violations.len(), 1);
        let v = &violations[0];
        assert_eq!(v.field, "algorithm");
        assert!(v.offending.contains("des"));
        assert!(v.allowed.contains("aes-256-gcm"));
        assert!(v.rule_location.is_some());
    }

    #[test]
    fn iteration_boundary_is_exact() {
        let mut config = base_config("aes-128-cbc");
        config.kdf = Some(Sourced::user(kdf(9999, 20)));
        let violations = rules().validate_config(&config).unwrap_err();
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].field, "kdf.iterations");

        config.kdf = Some(Sourced::user(kdf(10000, 20)));
        assert!(rules().validate_config(&config).is_ok());
    }

    #[test]
    fn salt_boundary_is_exact() {
        let mut config = base_config("aes-128-cbc");
        config.kdf = Some(Sourced::user(kdf(10000, 19)));
        let violations = rules().validate_config(&config).unwrap_err();
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].field, "kdf.salt");
        assert!(explain(&violations[0]).contains("at least 20 bytes"));

        config.kdf = Some(Sourced::user(kdf(10000, 20)));
        assert!(rules().validate_config(&config).is_ok());
    }

    #[test]
    fn short_iv_names_the_expected_length() {
        let mut config = base_config("aes-128-cbc");
        config.iv = Some(Sourced::user(vec![0u8; 8]));
        let violations = rules().validate_config(&config).unwrap_err();
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].field, "iv");
        assert!(violations[0].allowed.contains("16"));
    }

    #[test]
    fn iv_rules_follow_the_algorithm_condition() {
        let mut config = base_config("aes-128-gcm");
        config.iv = Some(Sourced::user(vec![0u8; 12]));
        assert!(rules().validate_config(&config).is_ok());
        config.iv = Some(Sourced::user(vec![0u8; 16]));
        assert!(rules().validate_config(&config).is_err());
    }

    #[test]
    fn independent_breaches_yield_one_violation_each() {
        let mut config = base_config("des");
        config.iv = Some(Sourced::user(vec![0u8; 8]));
        config.kdf = Some(Sourced::user(kdf(9999, 4)));
        let violations = rules().validate_config(&config).unwrap_err();
        // algorithm, iv (no rule for des), iterations, salt, derived key
        // length (no rule for des)
        assert_eq!(violations.len(), 5);
        let fields: Vec<&str> = violations.iter().map(|v| v.field.as_str()).collect();
        assert!(fields.contains(&"algorithm"));
        assert!(fields.contains(&"iv"));
        assert!(fields.contains(&"kdf.iterations"));
        assert!(fields.contains(&"kdf.salt"));
        assert!(fields.contains(&"key"));
    }

    #[test]
    fn user_key_of_rule_length_passes_with_a_note() {
        let mut config = base_config("aes-128-cbc");
        config.key = Some(Sourced::user(SecretBytes::new(vec![7u8; 16])));
        let ok = rules().validate_config(&config).unwrap();
        assert_eq!(ok.notes.len(), 1);
        assert!(ok.notes[0].contains("cannot be checked"));
    }

    #[test]
    fn user_key_without_a_matching_rule_is_rejected() {
        let rules = compile(parse("Cipher ALGORITHM aes-128-cbc").unwrap());
        let mut config = base_config("aes-128-cbc");
        config.key = Some(Sourced::user(SecretBytes::new(vec![7u8; 16])));
        let violations = rules.validate_config(&config).unwrap_err();
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].field, "key");
        assert!(violations[0].rule_location.is_none());
    }

    #[test]
    fn empty_rules_fail_with_no_rules_for_task() {
        let rules = compile(parse("").unwrap());
        let violations = rules.validate_config(&base_config("aes-128-cbc")).unwrap_err();
        assert_eq!(violations.len(), 1);
        assert!(violations[0].allowed.contains("no rules for task"));
    }

    #[test]
    fn violation_text_never_contains_key_bytes() {
        let mut config = base_config("aes-128-cbc");
        let secret = vec![0xAB; 17];
        config.key = Some(Sourced::user(SecretBytes::new(secret.clone())));
        let violations = rules().validate_config(&config).unwrap_err();
        let rendered = explain(&violations[0]);
        assert!(!rendered.contains(&hex::encode(&secret)));
        assert!(rendered.contains("17-byte"));
    }

    #[test]
    fn modulus_size_is_checked_against_bare_length_rules() {
        let rules = compile(parse("KeyPair LENGTH IN [384, 512]").unwrap());
        let mut config = CryptoConfig::new(TaskKind::KeyPairGen);
        config.algorithm = Some(Sourced::engine("rsa".to_string()));
        config.modulus_length = Some(Sourced::user(64));
        let violations = rules.validate_config(&config).unwrap_err();
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].field, "modulus_length");

        config.modulus_length = Some(Sourced::user(384));
        assert!(rules.validate_config(&config).is_ok());
    }

    #[test]
    fn explain_mentions_location_field_and_hint() {
        let violations = rules().validate_config(&base_config("des")).unwrap_err();
        let text = explain(&violations[0]);
        assert!(text.contains("algorithm"));
        assert!(text.contains("Rule at <cryrule>:2:1"));
        assert!(text.contains("."));
    }
}
