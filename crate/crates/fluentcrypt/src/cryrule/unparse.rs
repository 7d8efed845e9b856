//! Canonical rendering of a parsed rule file.
//!
//! The output uses uppercase keywords, single spaces, one clause per line
//! and a blank line between sections. One-element lists are rendered in
//! their short form (`ALGORITHM x` rather than `ALGORITHM IN [x]`), matching
//! how the parser normalizes them, so `parse(unparse(f))` reproduces `f`.

use super::ast::*;
use std::fmt::Write;

/// Renders a rule file as canonical source text.
pub fn unparse(file: &RuleFile) -> String {
    let mut out = String::new();
    for (i, section) in file.sections.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        write_section(&mut out, section);
    }
    out
}

fn write_section(out: &mut String, section: &Section) {
    let _ = writeln!(out, "{}", section.class_name);
    for constraint in &section.constraints {
        match constraint {
            Constraint::Algorithms(w) => {
                let _ = writeln!(out, "ALGORITHM {}", ident_list(&w.algorithms));
            }
            Constraint::Iv(block) => {
                let _ = writeln!(out, "IV");
                for rule in &block.rules {
                    write_length_rule(out, rule);
                }
            }
            Constraint::SymmetricKey(block) => {
                let _ = writeln!(out, "SYMMETRICKEY");
                for rule in &block.length_rules {
                    write_length_rule(out, rule);
                }
                if let Some(bound) = &block.min_iterations {
                    let _ = writeln!(out, "ITERATIONS >= {}", bound.value);
                }
                if let Some(bound) = &block.min_salt_length {
                    let _ = writeln!(out, "SALTLENGTH >= {}", bound.value);
                }
            }
            Constraint::Length(rule) => {
                write_length_rule(out, rule);
            }
        }
    }
}

fn write_length_rule(out: &mut String, rule: &ConditionalLength) {
    let _ = write!(out, "LENGTH {}", number_list(&rule.lengths));
    if let Some(condition) = &rule.condition {
        let _ = write!(out, " IF ALGORITHM {}", ident_list(&condition.algorithms));
    }
    out.push('\n');
}

fn ident_list(items: &[String]) -> String {
    if items.len() == 1 {
        items[0].clone()
    } else {
        format!("IN [{}]", items.join(", "))
    }
}

fn number_list(items: &[u64]) -> String {
    if items.len() == 1 {
        items[0].to_string()
    } else {
        let joined = items
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        format!("IN [{joined}]")
    }
}

#[cfg(test)]
mod tests {
    use super::super::parser::parse;
    use super::*;

    #[test]
    fn single_algorithm_canonical_form() {
        let file = parse("Cipher\n\tALGORITHM aes-128-cbc").unwrap();
        assert_eq!(unparse(&file), "Cipher\nALGORITHM aes-128-cbc\n");
    }

    #[test]
    fn empty_file_renders_empty() {
        let file = RuleFile::default();
        assert_eq!(unparse(&file), "");
    }

    #[test]
    fn one_element_in_list_collapses_to_short_form() {
        let file = parse("Cipher ALGORITHM IN [aes-128-cbc]").unwrap();
        assert_eq!(unparse(&file), "Cipher\nALGORITHM aes-128-cbc\n");
    }

    #[test]
    fn symmetric_key_round_trips() {
        let source = "Cipher\nSymmetricKey\nLENGTH 16 IF ALGORITHM IN [aes-128-cbc, aes-128-gcm]\n\
                      LENGTH 24 IF ALGORITHM IN [aes-192-cbc, aes-192-gcm]\n\
                      LENGTH 32 IF ALGORITHM IN [aes-256-cbc, aes-256-gcm]\n\
                      ITERATIONS >= 10000\nSALTLENGTH >= 20";
        let file = parse(source).unwrap();
        let rendered = unparse(&file);
        let reparsed = parse(&rendered).unwrap();
        assert_eq!(file, reparsed);
        assert!(rendered.contains("SYMMETRICKEY\n"));
        assert!(rendered.contains("ITERATIONS >= 10000\n"));
    }

    #[test]
    fn sections_are_separated_by_a_blank_line() {
        let file = parse("Cipher ALGORITHM a\nHash ALGORITHM h").unwrap();
        assert_eq!(
            unparse(&file),
            "Cipher\nALGORITHM a\n\nHash\nALGORITHM h\n"
        );
    }
}
