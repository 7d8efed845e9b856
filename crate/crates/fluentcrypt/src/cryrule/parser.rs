//! Recursive-descent parser for rule files.
//!
//! The grammar, with case-insensitive keywords:
//!
//! ```text
//! file        := section* ;
//! section     := IDENT clause+ ;
//! clause      := algoClause | ivBlock | symKeyBlock | lenClause ;
//! algoClause  := "ALGORITHM" (IDENT | "IN" "[" identList "]") ;
//! ivBlock     := "IV" lenClause+ ;
//! symKeyBlock := "SYMMETRICKEY" lenClause+
//!                ("ITERATIONS" ">=" NUMBER)? ("SALTLENGTH" ">=" NUMBER)? ;
//! lenClause   := "LENGTH" (NUMBER | "IN" "[" numberList "]")
//!                ("IF" "ALGORITHM" ("IN" "[" identList "]" | IDENT))? ;
//! identList   := IDENT ("," IDENT)* ;
//! numberList  := NUMBER ("," NUMBER)* ;
//! ```
//!
//! A section ends where the next identifier appears in clause position. The
//! parser does not stop at the first problem: it records a diagnostic and
//! resynchronizes at the next clause keyword or section header, so one pass
//! reports everything it can find.

use super::ast::*;
use super::diagnostics::{ParseDiagnostic, Severity};
use super::token::{tokenize, Token, TokenKind};

/// Parses rule-file source text.
///
/// On success the returned [`RuleFile`] satisfies the structural invariants
/// of the syntax tree (non-empty, duplicate-free lists; unique section
/// names). On failure every diagnostic found in one pass is returned; at
/// least one of them has [`Severity::Error`].
pub fn parse(source: &str) -> Result<RuleFile, Vec<ParseDiagnostic>> {
    parse_named(source, "<cryrule>")
}

/// Like [`parse`], recording `source_name` (typically a file path) for use
/// in diagnostics and violation messages.
pub fn parse_named(source: &str, source_name: &str) -> Result<RuleFile, Vec<ParseDiagnostic>> {
    let (tokens, mut diagnostics) = tokenize(source);
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
        diagnostics: Vec::new(),
    };
    let sections = parser.file();
    diagnostics.extend(parser.diagnostics);
    if diagnostics.iter().any(|d| d.severity == Severity::Error) {
        Err(diagnostics)
    } else {
        Ok(RuleFile {
            sections,
            source_name: source_name.to_string(),
        })
    }
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    diagnostics: Vec<ParseDiagnostic>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn advance(&mut self) -> Option<&'a Token> {
        let tok = self.tokens.get(self.pos);
        if tok.is_some() {
            self.pos += 1;
        }
        tok
    }

    /// Position to attach a diagnostic to when we are at end of input.
    fn here(&self) -> Span {
        self.tokens
            .get(self.pos)
            .or_else(|| self.tokens.last())
            .map(|t| Span::new(t.line, t.column))
            .unwrap_or(Span::new(1, 1))
    }

    fn error_at(&mut self, span: Span, message: impl Into<String>) {
        self.diagnostics.push(ParseDiagnostic {
            line: span.line,
            column: span.column,
            message: message.into(),
            severity: Severity::Error,
        });
    }

    fn error_here(&mut self, message: impl Into<String>) {
        let span = self.here();
        self.error_at(span, message);
    }

    /// Skips tokens until something that can plausibly start a clause or a
    /// section, so one mistake does not drown the rest of the file in
    /// follow-up errors.
    fn synchronize(&mut self) {
        while let Some(tok) = self.peek() {
            if tok.kind.starts_clause() || tok.kind == TokenKind::Ident {
                return;
            }
            self.pos += 1;
        }
    }

    fn file(&mut self) -> Vec<Section> {
        let mut sections: Vec<Section> = Vec::new();
        while let Some(tok) = self.peek() {
            match tok.kind {
                TokenKind::Ident => {
                    let section = self.section();
                    let duplicate = sections
                        .iter()
                        .any(|s| s.class_name.eq_ignore_ascii_case(&section.class_name));
                    if duplicate {
                        self.error_at(
                            section.span,
                            format!(
                                "duplicate section '{}'; each class may be constrained by \
                                 exactly one section",
                                section.class_name
                            ),
                        );
                    } else {
                        sections.push(section);
                    }
                }
                _ => {
                    self.error_here(format!(
                        "expected a class name to open a section, found '{}'",
                        tok.text
                    ));
                    self.advance();
                    self.synchronize();
                    // A clause keyword without a section swallows the stray
                    // clause so its contents do not masquerade as sections.
                    if self.peek().is_some_and(|t| t.kind.starts_clause()) {
                        self.clause(&mut Vec::new(), &mut false);
                    }
                }
            }
        }
        sections
    }

    fn section(&mut self) -> Section {
        let name_tok = self.advance().expect("caller checked for an identifier");
        let span = Span::new(name_tok.line, name_tok.column);
        let mut constraints = Vec::new();
        let mut has_whitelist = false;
        while let Some(tok) = self.peek() {
            match tok.kind {
                TokenKind::Ident => break,
                kind if kind.starts_clause() => {
                    self.clause(&mut constraints, &mut has_whitelist);
                }
                _ => {
                    self.error_here(format!(
                        "expected a constraint clause (ALGORITHM, IV, SYMMETRICKEY or LENGTH), \
                         found '{}'",
                        tok.text
                    ));
                    self.advance();
                    self.synchronize();
                }
            }
        }
        if constraints.is_empty() {
            self.error_at(
                span,
                format!(
                    "section '{}' has no constraints; a section needs at least one clause",
                    name_tok.text
                ),
            );
        }
        Section {
            class_name: name_tok.text.clone(),
            constraints,
            span,
        }
    }

    fn clause(&mut self, constraints: &mut Vec<Constraint>, has_whitelist: &mut bool) {
        let tok = self.peek().expect("caller checked for a clause keyword");
        match tok.kind {
            TokenKind::Algorithm => {
                let span = Span::new(tok.line, tok.column);
                if let Some(whitelist) = self.algorithm_clause() {
                    if *has_whitelist {
                        self.error_at(
                            span,
                            "duplicate ALGORITHM clause in this section; list every allowed \
                             algorithm in one clause",
                        );
                    } else {
                        *has_whitelist = true;
                        constraints.push(Constraint::Algorithms(whitelist));
                    }
                }
            }
            TokenKind::Iv => {
                if let Some(block) = self.iv_block() {
                    constraints.push(Constraint::Iv(block));
                }
            }
            TokenKind::SymmetricKey => {
                if let Some(block) = self.symmetric_key_block() {
                    constraints.push(Constraint::SymmetricKey(block));
                }
            }
            TokenKind::Length => {
                if let Some(rule) = self.length_clause() {
                    constraints.push(Constraint::Length(rule));
                }
            }
            _ => unreachable!("clause() called on a non-clause token"),
        }
    }

    fn algorithm_clause(&mut self) -> Option<AlgorithmWhitelist> {
        let kw = self.advance().expect("ALGORITHM token");
        let span = Span::new(kw.line, kw.column);
        let algorithms = match self.peek() {
            Some(tok) if tok.kind == TokenKind::Ident => {
                let name = tok.text.clone();
                self.advance();
                vec![name]
            }
            Some(tok) if tok.kind == TokenKind::In => {
                self.advance();
                self.ident_list("algorithm")?
            }
            _ => {
                self.error_here(
                    "ALGORITHM must be followed by an algorithm name or IN [list of names]",
                );
                self.synchronize();
                return None;
            }
        };
        Some(AlgorithmWhitelist { algorithms, span })
    }

    fn iv_block(&mut self) -> Option<IvBlock> {
        let kw = self.advance().expect("IV token");
        let span = Span::new(kw.line, kw.column);
        let rules = self.length_rules();
        if rules.is_empty() {
            self.error_at(span, "IV must be followed by at least one LENGTH rule");
            return None;
        }
        Some(IvBlock { rules, span })
    }

    fn symmetric_key_block(&mut self) -> Option<SymmetricKeyBlock> {
        let kw = self.advance().expect("SYMMETRICKEY token");
        let span = Span::new(kw.line, kw.column);
        let length_rules = self.length_rules();
        if length_rules.is_empty() {
            self.error_at(
                span,
                "SYMMETRICKEY must be followed by at least one LENGTH rule",
            );
        }
        let mut min_iterations: Option<BoundClause> = None;
        let mut min_salt_length: Option<BoundClause> = None;
        loop {
            match self.peek().map(|t| t.kind) {
                Some(TokenKind::Iterations) => {
                    let clause = self.bound_clause("ITERATIONS");
                    if let Some(clause) = clause {
                        if min_iterations.is_some() {
                            self.error_at(clause.span, "duplicate ITERATIONS clause");
                        } else {
                            min_iterations = Some(clause);
                        }
                    }
                }
                Some(TokenKind::SaltLength) => {
                    let clause = self.bound_clause("SALTLENGTH");
                    if let Some(clause) = clause {
                        if min_salt_length.is_some() {
                            self.error_at(clause.span, "duplicate SALTLENGTH clause");
                        } else {
                            min_salt_length = Some(clause);
                        }
                    }
                }
                // LENGTH after the bounds would silently become a separate
                // bare clause; call the ordering mistake out instead.
                Some(TokenKind::Length)
                    if min_iterations.is_some() || min_salt_length.is_some() =>
                {
                    self.error_here(
                        "LENGTH rules must come before ITERATIONS/SALTLENGTH in a \
                         SYMMETRICKEY block",
                    );
                    self.length_clause();
                }
                _ => break,
            }
        }
        if length_rules.is_empty() {
            return None;
        }
        Some(SymmetricKeyBlock {
            length_rules,
            min_iterations,
            min_salt_length,
            span,
        })
    }

    fn bound_clause(&mut self, keyword: &str) -> Option<BoundClause> {
        let kw = self.advance().expect("bound keyword");
        let span = Span::new(kw.line, kw.column);
        match self.peek() {
            Some(tok) if tok.kind == TokenKind::Ge => {
                self.advance();
            }
            _ => {
                self.error_here(format!("expected '>=' after {keyword}"));
                self.synchronize();
                return None;
            }
        }
        let value = self.number(keyword)?;
        Some(BoundClause { value, span })
    }

    fn length_rules(&mut self) -> Vec<ConditionalLength> {
        let mut rules = Vec::new();
        while self.peek().map(|t| t.kind) == Some(TokenKind::Length) {
            if let Some(rule) = self.length_clause() {
                rules.push(rule);
            }
        }
        rules
    }

    fn length_clause(&mut self) -> Option<ConditionalLength> {
        let kw = self.advance().expect("LENGTH token");
        let span = Span::new(kw.line, kw.column);
        let lengths = match self.peek() {
            Some(tok) if tok.kind == TokenKind::Number => {
                let value = self.number("LENGTH")?;
                vec![value]
            }
            Some(tok) if tok.kind == TokenKind::In => {
                self.advance();
                self.number_list()?
            }
            _ => {
                self.error_here(
                    "LENGTH must be followed by a number of bytes or IN [list of numbers]",
                );
                self.synchronize();
                return None;
            }
        };
        let condition = if self.peek().map(|t| t.kind) == Some(TokenKind::If) {
            self.advance();
            match self.peek() {
                Some(tok) if tok.kind == TokenKind::Algorithm => {
                    self.advance();
                }
                _ => {
                    self.error_here("expected ALGORITHM after IF");
                    self.synchronize();
                    return None;
                }
            }
            let algorithms = match self.peek() {
                Some(tok) if tok.kind == TokenKind::Ident => {
                    let name = tok.text.clone();
                    self.advance();
                    vec![name]
                }
                Some(tok) if tok.kind == TokenKind::In => {
                    self.advance();
                    self.ident_list("algorithm")?
                }
                _ => {
                    self.error_here(
                        "IF ALGORITHM must be followed by an algorithm name or IN [list of names]",
                    );
                    self.synchronize();
                    return None;
                }
            };
            Some(AlgorithmCondition { algorithms })
        } else {
            None
        };
        Some(ConditionalLength {
            lengths,
            condition,
            span,
        })
    }

    fn number(&mut self, context: &str) -> Option<u64> {
        match self.peek() {
            Some(tok) if tok.kind == TokenKind::Number => {
                let span = Span::new(tok.line, tok.column);
                let text = tok.text.clone();
                self.advance();
                match text.parse::<u64>() {
                    Ok(0) => {
                        self.error_at(span, format!("{context} expects a positive number"));
                        None
                    }
                    Ok(value) => Some(value),
                    Err(_) => {
                        self.error_at(span, format!("number '{text}' is too large"));
                        None
                    }
                }
            }
            Some(tok) => {
                let msg = format!("{context} expects a number, found '{}'", tok.text);
                self.error_here(msg);
                self.synchronize();
                None
            }
            None => {
                self.error_here(format!("{context} expects a number, found end of file"));
                None
            }
        }
    }

    fn ident_list(&mut self, what: &str) -> Option<Vec<String>> {
        self.bracketed_list(what, |parser| match parser.peek() {
            Some(tok) if tok.kind == TokenKind::Ident => {
                let name = tok.text.clone();
                parser.advance();
                Some(name)
            }
            _ => {
                parser.error_here(format!("expected an {what} name"));
                None
            }
        })
    }

    fn number_list(&mut self) -> Option<Vec<u64>> {
        self.bracketed_list("length", |parser| parser.number("LENGTH"))
    }

    /// Parses `[ item ("," item)* ]`, reporting empty lists, duplicates and
    /// missing brackets.
    fn bracketed_list<T: PartialEq + std::fmt::Display>(
        &mut self,
        what: &str,
        mut item: impl FnMut(&mut Self) -> Option<T>,
    ) -> Option<Vec<T>> {
        match self.peek() {
            Some(tok) if tok.kind == TokenKind::LBracket => {
                self.advance();
            }
            _ => {
                self.error_here("expected '[' after IN");
                self.synchronize();
                return None;
            }
        }
        if self.peek().map(|t| t.kind) == Some(TokenKind::RBracket) {
            self.error_here(format!("empty {what} list"));
            self.advance();
            return None;
        }
        let mut items: Vec<T> = Vec::new();
        loop {
            let span = self.here();
            match item(self) {
                Some(value) => {
                    if items.contains(&value) {
                        self.error_at(span, format!("duplicate {what} '{value}' in list"));
                    } else {
                        items.push(value);
                    }
                }
                None => {
                    self.synchronize();
                    return None;
                }
            }
            match self.peek() {
                Some(tok) if tok.kind == TokenKind::Comma => {
                    self.advance();
                }
                Some(tok) if tok.kind == TokenKind::RBracket => {
                    self.advance();
                    break;
                }
                Some(tok) => {
                    let msg = format!("expected ',' or ']' in {what} list, found '{}'", tok.text);
                    self.error_here(msg);
                    self.synchronize();
                    return None;
                }
                None => {
                    self.error_here(format!("{what} list is missing its closing ']'"));
                    return None;
                }
            }
        }
        if items.is_empty() {
            None
        } else {
            Some(items)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_ok(source: &str) -> RuleFile {
        parse(source).unwrap_or_else(|d| panic!("parse failed: {d:?}"))
    }

    fn parse_err(source: &str) -> Vec<ParseDiagnostic> {
        parse(source).expect_err("expected diagnostics")
    }

    #[test]
    fn single_algorithm_section() {
        let file = parse_ok("Cipher\n\tALGORITHM aes-128-cbc");
        assert_eq!(file.sections.len(), 1);
        let section = &file.sections[0];
        assert_eq!(section.class_name, "Cipher");
        assert_eq!(
            section.constraints,
            vec![Constraint::Algorithms(AlgorithmWhitelist {
                algorithms: vec!["aes-128-cbc".to_string()],
                span: Span::default(),
            })]
        );
    }

    #[test]
    fn multi_algorithm_whitelist_preserves_order() {
        let file = parse_ok(
            "Cipher\n\tALGORITHM IN [aes-128-cbc, aes-128-gcm, aes-192-cbc, aes-192-gcm, \
             aes-256-cbc, aes-256-gcm]",
        );
        let whitelist = file.sections[0].whitelist().unwrap();
        assert_eq!(whitelist.algorithms.len(), 6);
        assert_eq!(whitelist.algorithms[0], "aes-128-cbc");
        assert_eq!(whitelist.algorithms[5], "aes-256-gcm");
    }

    #[test]
    fn iv_block_with_conditions() {
        let file = parse_ok(
            "Cipher\n\tIV\n\tLENGTH 16 IF ALGORITHM IN [aes-128-cbc, aes-192-cbc, aes-256-cbc]\n\
             \tLENGTH 12 IF ALGORITHM IN [aes-128-gcm, aes-192-gcm, aes-256-gcm]",
        );
        let Constraint::Iv(block) = &file.sections[0].constraints[0] else {
            panic!("expected IV block");
        };
        assert_eq!(block.rules.len(), 2);
        assert_eq!(block.rules[0].lengths, vec![16]);
        assert_eq!(
            block.rules[0].condition.as_ref().unwrap().algorithms,
            vec!["aes-128-cbc", "aes-192-cbc", "aes-256-cbc"]
        );
        assert_eq!(block.rules[1].lengths, vec![12]);
    }

    #[test]
    fn symmetric_key_block_with_bounds() {
        let file = parse_ok(
            "Cipher\n\tSymmetricKey\n\tLENGTH 16 IF ALGORITHM IN [aes-128-cbc, aes-128-gcm]\n\
             \tLENGTH 24 IF ALGORITHM IN [aes-192-cbc, aes-192-gcm]\n\
             \tLENGTH 32 IF ALGORITHM IN [aes-256-cbc, aes-256-gcm]\n\
             \tITERATIONS >= 10000\n\tSALTLENGTH >= 20",
        );
        let Constraint::SymmetricKey(block) = &file.sections[0].constraints[0] else {
            panic!("expected SYMMETRICKEY block");
        };
        assert_eq!(block.length_rules.len(), 3);
        assert_eq!(block.min_iterations.as_ref().unwrap().value, 10000);
        assert_eq!(block.min_salt_length.as_ref().unwrap().value, 20);
    }

    #[test]
    fn bounds_accepted_in_either_order() {
        let a = parse_ok("Cipher\nSymmetricKey LENGTH 16 ITERATIONS >= 1 SALTLENGTH >= 2");
        let b = parse_ok("Cipher\nSymmetricKey LENGTH 16 SALTLENGTH >= 2 ITERATIONS >= 1");
        assert_eq!(a, b);
    }

    #[test]
    fn empty_algorithm_list_is_an_error() {
        let diags = parse_err("Cipher ALGORITHM IN []");
        assert!(
            diags.iter().any(|d| d.message.contains("empty algorithm list")),
            "got: {diags:?}"
        );
    }

    #[test]
    fn empty_source_is_an_empty_file() {
        let file = parse_ok("");
        assert!(file.sections.is_empty());
    }

    #[test]
    fn duplicate_section_name_is_an_error() {
        let diags = parse_err("Cipher ALGORITHM a\nHash ALGORITHM h\ncipher ALGORITHM b");
        assert!(
            diags.iter().any(|d| d.message.contains("duplicate section")),
            "got: {diags:?}"
        );
    }

    #[test]
    fn non_numeric_length_is_an_error() {
        let diags = parse_err("Cipher IV LENGTH abc");
        assert!(
            diags
                .iter()
                .any(|d| d.message.contains("must be followed by a number")),
            "got: {diags:?}"
        );
    }

    #[test]
    fn missing_bracket_is_an_error() {
        let diags = parse_err("Cipher ALGORITHM IN aes, des");
        assert!(
            diags.iter().any(|d| d.message.contains("expected '['")),
            "got: {diags:?}"
        );
    }

    #[test]
    fn unterminated_list_is_an_error() {
        let diags = parse_err("Cipher ALGORITHM IN [aes, des");
        assert!(
            diags.iter().any(|d| d.message.contains("closing ']'")),
            "got: {diags:?}"
        );
    }

    #[test]
    fn zero_length_is_an_error() {
        let diags = parse_err("Cipher IV LENGTH 0");
        assert!(
            diags.iter().any(|d| d.message.contains("positive")),
            "got: {diags:?}"
        );
    }

    #[test]
    fn duplicate_list_entry_is_an_error() {
        let diags = parse_err("Cipher ALGORITHM IN [aes, aes]");
        assert!(
            diags.iter().any(|d| d.message.contains("duplicate")),
            "got: {diags:?}"
        );
    }

    #[test]
    fn recovery_reports_errors_in_multiple_sections() {
        let diags = parse_err("Cipher ALGORITHM IN []\nHash ALGORITHM IN []");
        let errors: Vec<_> = diags
            .iter()
            .filter(|d| d.message.contains("empty algorithm list"))
            .collect();
        assert_eq!(errors.len(), 2, "got: {diags:?}");
    }

    #[test]
    fn section_without_clauses_is_an_error() {
        let diags = parse_err("Cipher\nHash ALGORITHM sha256");
        assert!(
            diags.iter().any(|d| d.message.contains("no constraints")),
            "got: {diags:?}"
        );
    }

    #[test]
    fn keyword_at_top_level_is_an_error() {
        let diags = parse_err("ALGORITHM aes");
        assert!(
            diags.iter().any(|d| d.message.contains("expected a class name")),
            "got: {diags:?}"
        );
    }

    #[test]
    fn bare_length_clause_parses() {
        let file = parse_ok("KeyPair LENGTH IN [384, 512]");
        let Constraint::Length(rule) = &file.sections[0].constraints[0] else {
            panic!("expected bare LENGTH clause");
        };
        assert_eq!(rule.lengths, vec![384, 512]);
        assert!(rule.condition.is_none());
    }

    #[test]
    fn length_after_bounds_is_called_out() {
        let diags = parse_err("Cipher SymmetricKey LENGTH 16 ITERATIONS >= 1 LENGTH 24");
        assert!(
            diags
                .iter()
                .any(|d| d.message.contains("must come before ITERATIONS")),
            "got: {diags:?}"
        );
    }

    #[test]
    fn keyword_case_is_irrelevant() {
        let upper = parse_ok("Cipher ALGORITHM IN [aes-128-cbc] IV LENGTH 16");
        let lower = parse_ok("Cipher algorithm in [aes-128-cbc] iv length 16");
        assert_eq!(upper, lower);
    }

    #[test]
    fn identifier_case_is_preserved() {
        let file = parse_ok("Cipher ALGORITHM AES-128-CBC");
        assert_eq!(
            file.sections[0].whitelist().unwrap().algorithms,
            vec!["AES-128-CBC"]
        );
    }

    #[test]
    fn spans_point_at_clause_starts() {
        let file = parse_ok("Cipher\n  ALGORITHM aes\n  IV\n  LENGTH 16");
        let section = &file.sections[0];
        assert_eq!(section.span, Span::new(1, 1));
        let Constraint::Algorithms(w) = &section.constraints[0] else {
            panic!()
        };
        assert_eq!((w.span.line, w.span.column), (2, 3));
        let Constraint::Iv(iv) = &section.constraints[1] else {
            panic!()
        };
        assert_eq!((iv.span.line, iv.span.column), (3, 3));
        assert_eq!((iv.rules[0].span.line, iv.rules[0].span.column), (4, 3));
    }
}
