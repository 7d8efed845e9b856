//! The rule engine: compiles a parsed rule file into a queryable form,
//! derives secure defaults from it, validates effective configurations
//! against it and renders guiding messages when something is off.
//!
//! The engine whitelists: a value passes only when a rule explicitly allows
//! it. The first entry of every list is the secure default. A compiled
//! [`RuleSet`] is immutable and freely shareable across threads.

mod config;
mod load;
mod validate;

pub use config::{
    default_encodings, CryptoConfig, KdfParams, Provenance, Sourced, TaskKind,
};
pub use load::{default_rule_set, embedded_default_text, load_rules, RuleLoadError, RULES_ENV_VAR};
pub use validate::{explain, ValidationOk, Violation};

use crate::cryrule::{unparse, Constraint, RuleFile, Span};
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Position of a rule inside its rule file, for messages that point the
/// reader at the exact line to edit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceLocation {
    pub source: String,
    pub line: u32,
    pub column: u32,
}

impl SourceLocation {
    fn new(source: &str, span: Span) -> Self {
        SourceLocation {
            source: source.to_string(),
            line: span.line,
            column: span.column,
        }
    }
}

impl fmt::Display for SourceLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.source, self.line, self.column)
    }
}

/// A compiled length rule: the lengths it allows (first = default) and the
/// algorithms it applies to (`None` = unconditional).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LengthRule {
    pub lengths: Vec<u64>,
    /// Lowercased algorithm names from the `IF` condition.
    pub condition: Option<Vec<String>>,
    pub location: SourceLocation,
}

impl LengthRule {
    fn matches(&self, algorithm_lower: &str) -> bool {
        match &self.condition {
            None => true,
            Some(algorithms) => algorithms.iter().any(|a| a == algorithm_lower),
        }
    }

    pub fn default_length(&self) -> u64 {
        self.lengths[0]
    }

    pub fn allows(&self, length: u64) -> bool {
        self.lengths.contains(&length)
    }
}

/// Length rules plus a per-algorithm index so the matching rule for a known
/// algorithm is a map hit instead of a scan.
#[derive(Debug, Clone, Default)]
struct RuleList {
    rules: Vec<LengthRule>,
    by_algorithm: HashMap<String, usize>,
    first_unconditional: Option<usize>,
}

impl RuleList {
    fn rebuild_index(&mut self, known_algorithms: &[String]) {
        self.by_algorithm.clear();
        self.first_unconditional = self.rules.iter().position(|r| r.condition.is_none());
        let mut mentioned: Vec<String> = known_algorithms.to_vec();
        for rule in &self.rules {
            if let Some(algorithms) = &rule.condition {
                mentioned.extend(algorithms.iter().cloned());
            }
        }
        for algorithm in mentioned {
            if let Some(i) = self.rules.iter().position(|r| r.matches(&algorithm)) {
                self.by_algorithm.insert(algorithm, i);
            }
        }
    }

    /// First rule in source order that applies to `algorithm`.
    fn rule_for(&self, algorithm_lower: &str) -> Option<&LengthRule> {
        match self.by_algorithm.get(algorithm_lower) {
            Some(&i) => Some(&self.rules[i]),
            None => self.first_unconditional.map(|i| &self.rules[i]),
        }
    }
}

/// Compiled constraints for one task class.
#[derive(Debug, Clone)]
pub struct ClassRules {
    class_name: String,
    location: SourceLocation,
    /// Whitelisted algorithms in source order; the first one is the default.
    algorithms: Vec<String>,
    algorithms_lower: Vec<String>,
    whitelist_location: Option<SourceLocation>,
    iv_rules: RuleList,
    key_rules: RuleList,
    /// Bare LENGTH rules on the section's primary object (key-pair modulus).
    length_rules: RuleList,
    min_iterations: Option<(u64, SourceLocation)>,
    min_salt_length: Option<(u64, SourceLocation)>,
}

impl ClassRules {
    pub fn class_name(&self) -> &str {
        &self.class_name
    }

    pub fn algorithms(&self) -> &[String] {
        &self.algorithms
    }

    pub fn whitelist_location(&self) -> Option<&SourceLocation> {
        self.whitelist_location.as_ref()
    }

    pub fn location(&self) -> &SourceLocation {
        &self.location
    }

    pub fn allows_algorithm(&self, algorithm: &str) -> bool {
        let lower = algorithm.to_ascii_lowercase();
        self.algorithms_lower.iter().any(|a| *a == lower)
    }

    pub fn iv_rule_for(&self, algorithm: &str) -> Option<&LengthRule> {
        self.iv_rules.rule_for(&algorithm.to_ascii_lowercase())
    }

    pub fn key_rule_for(&self, algorithm: &str) -> Option<&LengthRule> {
        self.key_rules.rule_for(&algorithm.to_ascii_lowercase())
    }

    pub fn length_rule_for(&self, algorithm: &str) -> Option<&LengthRule> {
        self.length_rules.rule_for(&algorithm.to_ascii_lowercase())
    }

    pub fn min_iterations(&self) -> Option<u64> {
        self.min_iterations.as_ref().map(|(v, _)| *v)
    }

    pub fn min_salt_length(&self) -> Option<u64> {
        self.min_salt_length.as_ref().map(|(v, _)| *v)
    }

    pub fn min_iterations_location(&self) -> Option<&SourceLocation> {
        self.min_iterations.as_ref().map(|(_, loc)| loc)
    }

    pub fn min_salt_length_location(&self) -> Option<&SourceLocation> {
        self.min_salt_length.as_ref().map(|(_, loc)| loc)
    }
}

/// A non-fatal oddity found while compiling a rule file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompileWarning {
    pub message: String,
    pub location: SourceLocation,
}

impl fmt::Display for CompileWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "warning at {}: {}", self.location, self.message)
    }
}

/// A rule file compiled for fast queries.
#[derive(Debug, Clone)]
pub struct RuleSet {
    classes: Vec<ClassRules>,
    by_name: HashMap<String, usize>,
    warnings: Vec<CompileWarning>,
    source: Arc<RuleFile>,
}

/// Why a default or a required size could not be derived from the rules.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RuleQueryError {
    #[error("no rules for task: the rule file has no '{class}' section")]
    NoRulesForTask { class: String },

    #[error("no default algorithm: the '{class}' section lists no algorithms")]
    NoDefaultAlgorithm { class: String },

    #[error("no {subject} length rule in section '{class}' applies to algorithm '{algorithm}'")]
    NoConstraint {
        class: String,
        subject: &'static str,
        algorithm: String,
    },
}

/// Compiles a parsed rule file. Never fails: problems that are not already
/// parse errors (a condition naming an algorithm outside the whitelist,
/// repeated bounds) become [`CompileWarning`]s.
pub fn compile(file: RuleFile) -> RuleSet {
    let mut warnings = Vec::new();
    let source_name = file.source_name.clone();
    let mut classes: Vec<ClassRules> = Vec::new();
    for section in &file.sections {
        let mut class = ClassRules {
            class_name: section.class_name.clone(),
            location: SourceLocation::new(&source_name, section.span),
            algorithms: Vec::new(),
            algorithms_lower: Vec::new(),
            whitelist_location: None,
            iv_rules: RuleList::default(),
            key_rules: RuleList::default(),
            length_rules: RuleList::default(),
            min_iterations: None,
            min_salt_length: None,
        };
        for constraint in &section.constraints {
            match constraint {
                Constraint::Algorithms(w) => {
                    class.algorithms = w.algorithms.clone();
                    class.algorithms_lower = w
                        .algorithms
                        .iter()
                        .map(|a| a.to_ascii_lowercase())
                        .collect();
                    class.whitelist_location =
                        Some(SourceLocation::new(&source_name, w.span));
                }
                Constraint::Iv(block) => {
                    for rule in &block.rules {
                        class.iv_rules.rules.push(compile_length_rule(&source_name, rule));
                    }
                }
                Constraint::SymmetricKey(block) => {
                    for rule in &block.length_rules {
                        class.key_rules.rules.push(compile_length_rule(&source_name, rule));
                    }
                    if let Some(bound) = &block.min_iterations {
                        let location = SourceLocation::new(&source_name, bound.span);
                        merge_bound(
                            &mut class.min_iterations,
                            bound.value,
                            location,
                            "ITERATIONS",
                            &mut warnings,
                        );
                    }
                    if let Some(bound) = &block.min_salt_length {
                        let location = SourceLocation::new(&source_name, bound.span);
                        merge_bound(
                            &mut class.min_salt_length,
                            bound.value,
                            location,
                            "SALTLENGTH",
                            &mut warnings,
                        );
                    }
                }
                Constraint::Length(rule) => {
                    class
                        .length_rules
                        .rules
                        .push(compile_length_rule(&source_name, rule));
                }
            }
        }
        // Index by the whitelist plus every algorithm a condition mentions.
        class.iv_rules.rebuild_index(&class.algorithms_lower);
        class.key_rules.rebuild_index(&class.algorithms_lower);
        class.length_rules.rebuild_index(&class.algorithms_lower);

        if !class.algorithms.is_empty() {
            for list in [&class.iv_rules, &class.key_rules, &class.length_rules] {
                for rule in &list.rules {
                    let Some(condition) = &rule.condition else {
                        continue;
                    };
                    for algorithm in condition {
                        if !class.algorithms_lower.contains(algorithm) {
                            warnings.push(CompileWarning {
                                message: format!(
                                    "condition mentions '{algorithm}', which is not in the \
                                     ALGORITHM whitelist of section '{}'; the rule can never \
                                     apply",
                                    class.class_name
                                ),
                                location: rule.location.clone(),
                            });
                        }
                    }
                }
            }
        }
        classes.push(class);
    }

    let by_name = classes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.class_name.to_ascii_lowercase(), i))
        .collect();
    RuleSet {
        classes,
        by_name,
        warnings,
        source: Arc::new(file),
    }
}

fn compile_length_rule(source_name: &str, rule: &crate::cryrule::ConditionalLength) -> LengthRule {
    LengthRule {
        lengths: rule.lengths.clone(),
        condition: rule
            .condition
            .as_ref()
            .map(|c| c.algorithms.iter().map(|a| a.to_ascii_lowercase()).collect()),
        location: SourceLocation::new(source_name, rule.span),
    }
}

fn no_constraint(class: &ClassRules, subject: &'static str, algorithm: &str) -> RuleQueryError {
    RuleQueryError::NoConstraint {
        class: class.class_name.clone(),
        subject,
        algorithm: algorithm.to_string(),
    }
}

fn merge_bound(
    slot: &mut Option<(u64, SourceLocation)>,
    value: u64,
    location: SourceLocation,
    keyword: &str,
    warnings: &mut Vec<CompileWarning>,
) {
    match slot {
        None => *slot = Some((value, location)),
        Some((existing, _)) => {
            warnings.push(CompileWarning {
                message: format!(
                    "{keyword} is constrained more than once; keeping the stricter bound \
                     ({})",
                    (*existing).max(value)
                ),
                location: location.clone(),
            });
            if value > *existing {
                *slot = Some((value, location));
            }
        }
    }
}

impl RuleSet {
    pub fn warnings(&self) -> &[CompileWarning] {
        &self.warnings
    }

    pub fn source(&self) -> &RuleFile {
        &self.source
    }

    pub fn source_name(&self) -> &str {
        &self.source.source_name
    }

    /// Canonical rule-language text of the rules in force.
    pub fn to_canonical_text(&self) -> String {
        unparse(&self.source)
    }

    /// Rules for a class, looked up case-insensitively.
    pub fn class(&self, name: &str) -> Option<&ClassRules> {
        self.by_name
            .get(&name.to_ascii_lowercase())
            .map(|&i| &self.classes[i])
    }

    pub fn class_for_task(&self, task: TaskKind) -> Option<&ClassRules> {
        self.class(task.section_name())
    }

    pub fn classes(&self) -> impl Iterator<Item = &ClassRules> {
        self.classes.iter()
    }

    /// The secure default algorithm for a task: the first whitelist entry of
    /// its section.
    pub fn default_algorithm(&self, task: TaskKind) -> Result<&str, RuleQueryError> {
        let class = self
            .class_for_task(task)
            .ok_or_else(|| RuleQueryError::NoRulesForTask {
                class: task.section_name().to_string(),
            })?;
        class
            .algorithms
            .first()
            .map(|s| s.as_str())
            .ok_or_else(|| RuleQueryError::NoDefaultAlgorithm {
                class: class.class_name.clone(),
            })
    }

    /// Default symmetric-key length in bytes for `algorithm`, from the
    /// Cipher section. Every length the matching rule lists is acceptable;
    /// the first is the one the engine generates.
    pub fn required_key_length(&self, algorithm: &str) -> Result<u64, RuleQueryError> {
        let class = self.require_class(TaskKind::SymmetricEncrypt)?;
        class
            .key_rule_for(algorithm)
            .map(LengthRule::default_length)
            .ok_or_else(|| no_constraint(class, "key", algorithm))
    }

    /// Default IV length in bytes for `algorithm`, from the Cipher section.
    pub fn required_iv_length(&self, algorithm: &str) -> Result<u64, RuleQueryError> {
        let class = self.require_class(TaskKind::SymmetricEncrypt)?;
        class
            .iv_rule_for(algorithm)
            .map(LengthRule::default_length)
            .ok_or_else(|| no_constraint(class, "IV", algorithm))
    }

    /// Default key-pair modulus length in bytes.
    pub fn default_modulus_length(&self) -> Result<u64, RuleQueryError> {
        let class = self.require_class(TaskKind::KeyPairGen)?;
        class
            .length_rule_for("rsa")
            .map(LengthRule::default_length)
            .ok_or_else(|| no_constraint(class, "modulus", "rsa"))
    }

    fn require_class(&self, task: TaskKind) -> Result<&ClassRules, RuleQueryError> {
        self.class_for_task(task)
            .ok_or_else(|| RuleQueryError::NoRulesForTask {
                class: task.section_name().to_string(),
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cryrule::parse;

    fn rule_set(source: &str) -> RuleSet {
        compile(parse(source).unwrap())
    }

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

    #[test]
    fn whitelist_has_six_entries_and_preserves_order() {
        let rules = rule_set(CIPHER_RULES);
        let class = rules.class("Cipher").unwrap();
        assert_eq!(class.algorithms().len(), 6);
        assert_eq!(class.algorithms()[0], "aes-128-cbc");
        assert_eq!(
            rules.default_algorithm(TaskKind::SymmetricEncrypt).unwrap(),
            "aes-128-cbc"
        );
    }

    #[test]
    fn single_entry_whitelist_without_iv_rules() {
        let rules = rule_set("Cipher\nALGORITHM aes-128-cbc\n");
        assert_eq!(
            rules.default_algorithm(TaskKind::SymmetricEncrypt).unwrap(),
            "aes-128-cbc"
        );
        assert!(matches!(
            rules.required_iv_length("aes-128-cbc"),
            Err(RuleQueryError::NoConstraint { .. })
        ));
    }

    #[test]
    fn empty_rule_file_answers_no_rules_for_task() {
        let rules = rule_set("");
        assert!(matches!(
            rules.default_algorithm(TaskKind::Hash),
            Err(RuleQueryError::NoRulesForTask { .. })
        ));
    }

    #[test]
    fn key_lengths_follow_conditions() {
        let rules = rule_set(CIPHER_RULES);
        assert_eq!(rules.required_key_length("aes-256-gcm").unwrap(), 32);
        assert_eq!(rules.required_key_length("aes-128-cbc").unwrap(), 16);
        assert_eq!(rules.required_key_length("aes-192-cbc").unwrap(), 24);
    }

    #[test]
    fn iv_lengths_follow_conditions() {
        let rules = rule_set(CIPHER_RULES);
        assert_eq!(rules.required_iv_length("aes-128-cbc").unwrap(), 16);
        assert_eq!(rules.required_iv_length("aes-128-gcm").unwrap(), 12);
        assert!(matches!(
            rules.required_iv_length("des"),
            Err(RuleQueryError::NoConstraint { .. })
        ));
    }

    #[test]
    fn algorithm_matching_is_case_insensitive() {
        let rules = rule_set(CIPHER_RULES);
        let class = rules.class("cipher").unwrap();
        assert!(class.allows_algorithm("AES-128-CBC"));
        assert_eq!(rules.required_key_length("AES-256-GCM").unwrap(), 32);
    }

    #[test]
    fn first_matching_rule_wins() {
        let rules = rule_set("Cipher\nIV\nLENGTH 16 IF ALGORITHM a\nLENGTH IN [12, 16]\n");
        // 'a' hits the conditional rule first, everything else the
        // unconditional one.
        assert_eq!(rules.required_iv_length("a").unwrap(), 16);
        assert_eq!(rules.required_iv_length("b").unwrap(), 12);
    }

    #[test]
    fn condition_outside_whitelist_warns() {
        let rules = rule_set("Cipher\nALGORITHM aes-128-cbc\nIV\nLENGTH 16 IF ALGORITHM des\n");
        assert_eq!(rules.warnings().len(), 1);
        assert!(rules.warnings()[0].message.contains("des"));
    }

    #[test]
    fn permuting_the_whitelist_changes_the_default() {
        let a = rule_set("Hash ALGORITHM IN [sha256, sha512]");
        let b = rule_set("Hash ALGORITHM IN [sha512, sha256]");
        assert_eq!(a.default_algorithm(TaskKind::Hash).unwrap(), "sha256");
        assert_eq!(b.default_algorithm(TaskKind::Hash).unwrap(), "sha512");
    }

    #[test]
    fn bare_length_rules_drive_the_modulus_default() {
        let rules = rule_set("KeyPair LENGTH IN [384, 512]");
        assert_eq!(rules.default_modulus_length().unwrap(), 384);
    }

    #[test]
    fn duplicate_bounds_keep_the_stricter_value_and_warn() {
        let rules = rule_set(
            "Cipher SymmetricKey LENGTH 16 ITERATIONS >= 100 \
             SymmetricKey LENGTH 16 ITERATIONS >= 5000",
        );
        let class = rules.class("Cipher").unwrap();
        assert_eq!(class.min_iterations(), Some(5000));
        assert!(!rules.warnings().is_empty());
    }
}
