//! Properties of the rule engine: whitelist semantics, tightening rules
//! never admits new configs, violation counts are exact, and secret bytes
//! never surface in renderings.

use fluentcrypt::cryrule::{
    parse, AlgorithmCondition, AlgorithmWhitelist, BoundClause, ConditionalLength, Constraint,
    RuleFile, Section, Span, SymmetricKeyBlock,
};
use fluentcrypt::rules::{compile, explain, CryptoConfig, KdfParams, Sourced, TaskKind};
use fluentcrypt::{RuleSet, SecretBytes};
use proptest::prelude::*;

const POOL: [&str; 4] = ["alg-a", "alg-b", "alg-c", "alg-d"];

#[derive(Debug, Clone)]
struct CipherRulesSpec {
    whitelist: Vec<String>,
    key_rules: Vec<(Vec<u64>, Option<Vec<String>>)>,
    iv_rules: Vec<(Vec<u64>, Option<Vec<String>>)>,
    min_iterations: Option<u64>,
    min_salt: Option<u64>,
}

impl CipherRulesSpec {
    fn build(&self) -> RuleSet {
        let mut constraints = vec![Constraint::Algorithms(AlgorithmWhitelist {
            algorithms: self.whitelist.clone(),
            span: Span::default(),
        })];
        if !self.iv_rules.is_empty() {
            constraints.push(Constraint::Iv(fluentcrypt::cryrule::IvBlock {
                rules: self.iv_rules.iter().map(to_rule).collect(),
                span: Span::default(),
            }));
        }
        if !self.key_rules.is_empty() || self.min_iterations.is_some() || self.min_salt.is_some() {
            let length_rules = if self.key_rules.is_empty() {
                // the grammar demands at least one length rule per block
                vec![to_rule(&(vec![16], None))]
            } else {
                self.key_rules.iter().map(to_rule).collect()
            };
            constraints.push(Constraint::SymmetricKey(SymmetricKeyBlock {
                length_rules,
                min_iterations: self.min_iterations.map(|value| BoundClause {
                    value,
                    span: Span::default(),
                }),
                min_salt_length: self.min_salt.map(|value| BoundClause {
                    value,
                    span: Span::default(),
                }),
                span: Span::default(),
            }));
        }
        compile(RuleFile {
            sections: vec![Section {
                class_name: "Cipher".to_string(),
                constraints,
                span: Span::default(),
            }],
            source_name: "<generated>".to_string(),
        })
    }
}

fn to_rule(spec: &(Vec<u64>, Option<Vec<String>>)) -> ConditionalLength {
    ConditionalLength {
        lengths: spec.0.clone(),
        condition: spec
            .1
            .as_ref()
            .map(|algorithms| AlgorithmCondition {
                algorithms: algorithms.clone(),
            }),
        span: Span::default(),
    }
}

fn algorithms(max: usize) -> impl Strategy<Value = Vec<String>> {
    proptest::sample::subsequence(POOL.to_vec(), 1..=max)
        .prop_map(|v| v.into_iter().map(String::from).collect())
}

fn lengths() -> impl Strategy<Value = Vec<u64>> {
    proptest::collection::btree_set(1u64..=48, 1..=3).prop_map(|s| s.into_iter().collect())
}

fn length_rules(max: usize) -> impl Strategy<Value = Vec<(Vec<u64>, Option<Vec<String>>)>> {
    proptest::collection::vec((lengths(), proptest::option::of(algorithms(2))), 0..=max)
}

fn rules_spec() -> impl Strategy<Value = CipherRulesSpec> {
    (
        algorithms(4),
        length_rules(3),
        length_rules(3),
        proptest::option::of(1u64..=20_000),
        proptest::option::of(1u64..=32),
    )
        .prop_map(
            |(whitelist, key_rules, iv_rules, min_iterations, min_salt)| CipherRulesSpec {
                whitelist,
                key_rules,
                iv_rules,
                min_iterations,
                min_salt,
            },
        )
}

#[derive(Debug, Clone)]
struct ConfigSpec {
    algorithm: String,
    key_len: Option<u64>,
    iv_len: Option<u64>,
    kdf: Option<(u32, u64)>, // iterations, salt length
}

fn config_spec() -> impl Strategy<Value = ConfigSpec> {
    (
        proptest::sample::select(
            POOL.iter()
                .map(|s| s.to_string())
                .chain(["unlisted".to_string()])
                .collect::<Vec<_>>(),
        ),
        proptest::option::of(1u64..=48),
        proptest::option::of(1u64..=48),
        proptest::option::of((1u32..=20_000, 1u64..=32)),
    )
        .prop_map(|(algorithm, key_len, iv_len, kdf)| ConfigSpec {
            algorithm,
            // a config carries a key or a derivation plan, not both
            key_len: if kdf.is_some() { None } else { key_len },
            iv_len,
            kdf,
        })
}

impl ConfigSpec {
    fn build(&self) -> CryptoConfig {
        let mut config = CryptoConfig::new(TaskKind::SymmetricEncrypt);
        config.algorithm = Some(Sourced::user(self.algorithm.clone()));
        if let Some(len) = self.key_len {
            config.key = Some(Sourced::user(SecretBytes::new(vec![7u8; len as usize])));
        }
        if let Some(len) = self.iv_len {
            config.iv = Some(Sourced::user(vec![9u8; len as usize]));
        }
        if let Some((iterations, salt_len)) = self.kdf {
            config.kdf = Some(Sourced::user(KdfParams {
                password: SecretBytes::new(b"pw".to_vec()),
                salt: vec![3u8; salt_len as usize],
                iterations,
                digest: "sha256".to_string(),
                derived_length: 16,
            }));
        }
        config
    }
}

/// The ways a rule file can be made stricter.
#[derive(Debug, Clone, Copy)]
enum Restriction {
    DropWhitelistEntry(usize),
    DropKeyLength(usize, usize),
    DropIvLength(usize, usize),
    RaiseIterations(u64),
    RaiseSalt(u64),
}

fn restriction() -> impl Strategy<Value = Restriction> {
    prop_oneof![
        any::<usize>().prop_map(Restriction::DropWhitelistEntry),
        (any::<usize>(), any::<usize>()).prop_map(|(a, b)| Restriction::DropKeyLength(a, b)),
        (any::<usize>(), any::<usize>()).prop_map(|(a, b)| Restriction::DropIvLength(a, b)),
        (1u64..=10_000).prop_map(Restriction::RaiseIterations),
        (1u64..=16).prop_map(Restriction::RaiseSalt),
    ]
}

fn apply_restriction(spec: &CipherRulesSpec, restriction: Restriction) -> CipherRulesSpec {
    let mut next = spec.clone();
    match restriction {
        Restriction::DropWhitelistEntry(i) => {
            if next.whitelist.len() > 1 {
                let at = i % next.whitelist.len();
                next.whitelist.remove(at);
            }
        }
        Restriction::DropKeyLength(rule, entry) => {
            if !next.key_rules.is_empty() {
                let r = rule % next.key_rules.len();
                if next.key_rules[r].0.len() > 1 {
                    let at = entry % next.key_rules[r].0.len();
                    next.key_rules[r].0.remove(at);
                }
            }
        }
        Restriction::DropIvLength(rule, entry) => {
            if !next.iv_rules.is_empty() {
                let r = rule % next.iv_rules.len();
                if next.iv_rules[r].0.len() > 1 {
                    let at = entry % next.iv_rules[r].0.len();
                    next.iv_rules[r].0.remove(at);
                }
            }
        }
        Restriction::RaiseIterations(by) => {
            next.min_iterations = Some(next.min_iterations.unwrap_or(0) + by);
        }
        Restriction::RaiseSalt(by) => {
            next.min_salt = Some(next.min_salt.unwrap_or(0) + by);
        }
    }
    next
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(192))]

    /// Whitelist soundness: the algorithm check passes exactly for
    /// whitelist members (up to ASCII case).
    #[test]
    fn whitelist_soundness(spec in rules_spec(), config in config_spec()) {
        let rules = spec.build();
        let mut cfg = config.build();
        cfg.key = None;
        cfg.iv = None;
        cfg.kdf = None;
        let member = spec
            .whitelist
            .iter()
            .any(|a| a.eq_ignore_ascii_case(&config.algorithm));
        let verdict = rules.validate_config(&cfg);
        prop_assert_eq!(verdict.is_ok(), member);
    }

    /// Restricting the rules never turns a failing config into a passing
    /// one (whitelisting is monotone under tightening).
    #[test]
    fn tightening_rules_is_monotone(
        spec in rules_spec(),
        config in config_spec(),
        restrictions in proptest::collection::vec(restriction(), 1..=4),
    ) {
        let config = config.build();
        let before = spec.build().validate_config(&config).is_ok();
        let mut tightened = spec;
        for restriction in restrictions {
            tightened = apply_restriction(&tightened, restriction);
        }
        let after = tightened.build().validate_config(&config).is_ok();
        prop_assert!(
            !(after && !before),
            "tightening the rules turned a failing config into a passing one"
        );
    }

    /// A config breaking k independent constraints yields exactly k
    /// violations, as counted by an independent tally.
    #[test]
    fn violation_count_is_exact(config in config_spec()) {
        // Fixed, fully populated rules so each field is independently
        // decidable.
        let rules = compile(parse(
            "Cipher\n\
             ALGORITHM IN [alg-a, alg-b]\n\
             IV\n\
             LENGTH 16 IF ALGORITHM alg-a\n\
             LENGTH 12 IF ALGORITHM alg-b\n\
             SymmetricKey\n\
             LENGTH 16 IF ALGORITHM alg-a\n\
             LENGTH 24 IF ALGORITHM alg-b\n\
             ITERATIONS >= 10000\n\
             SALTLENGTH >= 20\n",
        ).unwrap());

        let covered = config.algorithm == "alg-a" || config.algorithm == "alg-b";
        let expected_iv = |a: &str| if a == "alg-a" { 16 } else { 12 };
        let expected_key = |a: &str| if a == "alg-a" { 16 } else { 24 };

        let mut expected = 0usize;
        if !covered {
            expected += 1; // algorithm off the whitelist
        }
        if let Some(iv) = config.iv_len {
            // uncovered algorithms have no applicable IV rule: rejected
            if !covered || iv != expected_iv(&config.algorithm) {
                expected += 1;
            }
        }
        if let Some(key) = config.key_len {
            if !covered || key != expected_key(&config.algorithm) {
                expected += 1;
            }
        }
        if let Some((iterations, salt_len)) = config.kdf {
            if u64::from(iterations) < 10_000 {
                expected += 1;
            }
            if salt_len < 20 {
                expected += 1;
            }
            // the planned derived length (16) must be allowed
            if !covered || expected_key(&config.algorithm) != 16 {
                expected += 1;
            }
        }

        let verdict = rules.validate_config(&config.build());
        match verdict {
            Ok(_) => prop_assert_eq!(expected, 0),
            Err(violations) => prop_assert_eq!(
                violations.len(),
                expected,
                "violations: {:#?}",
                violations
            ),
        }
    }

    /// No rendering of any violation contains secret bytes, in hex, base64
    /// or raw form.
    #[test]
    fn renderings_never_leak_secrets(
        key in proptest::collection::vec(any::<u8>(), 8..=40),
        password in proptest::collection::vec(any::<u8>(), 4..=32),
        salt in proptest::collection::vec(any::<u8>(), 1..=19),
    ) {
        let rules = fluentcrypt::rules::default_rule_set();
        let mut config = CryptoConfig::new(TaskKind::SymmetricEncrypt);
        config.algorithm = Some(Sourced::user("aes-128-cbc".to_string()));
        if key.len() != 16 {
            config.key = Some(Sourced::user(SecretBytes::new(key.clone())));
        } else {
            config.kdf = Some(Sourced::user(KdfParams {
                password: SecretBytes::new(password.clone()),
                salt: salt.clone(),
                iterations: 9_999,
                digest: "sha256".to_string(),
                derived_length: 16,
            }));
        }
        let violations = rules
            .validate_config(&config)
            .expect_err("configs here always violate something");

        use base64::Engine as _;
        let mut rendered = String::new();
        for violation in &violations {
            rendered.push_str(&explain(violation));
            rendered.push_str(&format!("{violation:?}"));
        }
        rendered.push_str(&format!("{config:?}"));
        for secret in [&key, &password, &salt] {
            if secret.len() < 4 {
                continue; // too short to be meaningfully searchable
            }
            let hex_lower = hex::encode(secret);
            let b64 = base64::engine::general_purpose::STANDARD.encode(secret);
            prop_assert!(!rendered.contains(&hex_lower));
            prop_assert!(!rendered.to_ascii_lowercase().contains(&hex_lower));
            prop_assert!(!rendered.contains(&b64));
            if let Ok(text) = std::str::from_utf8(secret) {
                if text.len() >= 4 {
                    prop_assert!(!rendered.contains(text));
                }
            }
        }
    }

    /// The default algorithm is always the first whitelist entry; permuting
    /// the whitelist moves the default with it.
    #[test]
    fn default_is_first_whitelist_entry(
        spec in rules_spec(),
        rotation in 0usize..4,
    ) {
        let rules = spec.build();
        prop_assert_eq!(
            rules.default_algorithm(TaskKind::SymmetricEncrypt).unwrap(),
            spec.whitelist[0].as_str()
        );
        let mut rotated = spec.clone();
        rotated.whitelist.rotate_left(rotation % rotated.whitelist.len().max(1));
        let rules = rotated.build();
        prop_assert_eq!(
            rules.default_algorithm(TaskKind::SymmetricEncrypt).unwrap(),
            rotated.whitelist[0].as_str()
        );
    }
}

/// Frozen wording of the guided message for a blocked algorithm. If this
/// changes, it should change on purpose.
#[test]
fn golden_blocked_algorithm_message() {
    let rules = fluentcrypt::rules::default_rule_set();
    let mut config = CryptoConfig::new(TaskKind::SymmetricEncrypt);
    config.algorithm = Some(Sourced::user("des".to_string()));
    let violations = rules.validate_config(&config).unwrap_err();
    assert_eq!(violations.len(), 1);
    assert_eq!(
        explain(&violations[0]),
        "Rule violation on algorithm: got 'des', allowed: aes-128-cbc, aes-128-gcm, \
         aes-192-cbc, aes-192-gcm, aes-256-cbc, aes-256-gcm. Pick one of the allowed \
         algorithms, or leave it unset to use the secure default (the first allowed \
         algorithm). Rule at default.cryrule (embedded):10:1."
    );
}

#[test]
fn empty_rule_set_names_the_missing_section() {
    let rules = compile(parse("").unwrap());
    let mut config = CryptoConfig::new(TaskKind::Hash);
    config.algorithm = Some(Sourced::user("sha256".to_string()));
    let violations = rules.validate_config(&config).unwrap_err();
    assert_eq!(violations.len(), 1);
    let text = explain(&violations[0]);
    assert!(text.contains("no rules for task"), "{text}");
    assert!(text.contains("'Hash'"), "{text}");
}

#[test]
fn explain_of_short_salt_names_the_minimum() {
    let rules = fluentcrypt::rules::default_rule_set();
    let mut config = CryptoConfig::new(TaskKind::SymmetricEncrypt);
    config.algorithm = Some(Sourced::user("aes-128-cbc".to_string()));
    config.kdf = Some(Sourced::user(KdfParams {
        password: SecretBytes::new(b"pw".to_vec()),
        salt: b"salt".to_vec(),
        iterations: 10_000,
        digest: "sha256".to_string(),
        derived_length: 16,
    }));
    let violations = rules.validate_config(&config).unwrap_err();
    assert_eq!(violations.len(), 1);
    let text = explain(&violations[0]);
    assert!(text.contains("at least 20 bytes"), "{text}");
    assert!(text.contains("4-byte"), "{text}");
    assert!(!text.contains("salt\" bytes"), "{text}");
}
