//! Lexer for the rule language.
//!
//! The language is not whitespace sensitive: spaces, tabs and line breaks
//! separate tokens but carry no meaning. Keywords are matched
//! case-insensitively; identifiers (class names, algorithm names such as
//! `aes-128-cbc`) are kept verbatim.

use super::diagnostics::{ParseDiagnostic, Severity};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Algorithm,
    In,
    Length,
    If,
    Iv,
    SymmetricKey,
    SaltLength,
    Iterations,
    /// The `>=` operator used by ITERATIONS and SALTLENGTH clauses.
    Ge,
    LBracket,
    RBracket,
    Comma,
    Number,
    Ident,
}

impl TokenKind {
    /// True for tokens that can open a constraint clause inside a section.
    pub fn starts_clause(self) -> bool {
        matches!(
            self,
            TokenKind::Algorithm | TokenKind::Iv | TokenKind::SymmetricKey | TokenKind::Length
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// Verbatim source text of the token.
    pub text: String,
    /// 1-based line of the first character.
    pub line: u32,
    /// 1-based column (in characters) of the first character.
    pub column: u32,
}

fn classify(word: &str) -> TokenKind {
    if word.bytes().all(|b| b.is_ascii_digit()) {
        return TokenKind::Number;
    }
    match word.to_ascii_uppercase().as_str() {
        "ALGORITHM" => TokenKind::Algorithm,
        "IN" => TokenKind::In,
        "LENGTH" => TokenKind::Length,
        "IF" => TokenKind::If,
        "IV" => TokenKind::Iv,
        "SYMMETRICKEY" => TokenKind::SymmetricKey,
        "SALTLENGTH" => TokenKind::SaltLength,
        "ITERATIONS" => TokenKind::Iterations,
        _ => TokenKind::Ident,
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '-' || c == '_' || c == '.'
}

/// Splits rule-language source text into tokens.
///
/// Whitespace and `#` line comments produce no tokens. Characters that
/// cannot start a token are reported as diagnostics and skipped, so lexing
/// always continues to the end of the input.
pub fn tokenize(source: &str) -> (Vec<Token>, Vec<ParseDiagnostic>) {
    let mut tokens = Vec::new();
    let mut diagnostics = Vec::new();
    let mut chars = source.chars().peekable();
    let mut line: u32 = 1;
    let mut column: u32 = 1;

    macro_rules! bump {
        ($c:expr) => {{
            if $c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }};
    }

    while let Some(&c) = chars.peek() {
        let (tok_line, tok_col) = (line, column);
        if c.is_whitespace() {
            chars.next();
            bump!(c);
            continue;
        }
        if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
                bump!(c);
            }
            continue;
        }
        let simple = match c {
            '[' => Some(TokenKind::LBracket),
            ']' => Some(TokenKind::RBracket),
            ',' => Some(TokenKind::Comma),
            _ => None,
        };
        if let Some(kind) = simple {
            chars.next();
            bump!(c);
            tokens.push(Token {
                kind,
                text: c.to_string(),
                line: tok_line,
                column: tok_col,
            });
            continue;
        }
        if c == '>' {
            chars.next();
            bump!(c);
            if chars.peek() == Some(&'=') {
                chars.next();
                bump!('=');
                tokens.push(Token {
                    kind: TokenKind::Ge,
                    text: ">=".to_string(),
                    line: tok_line,
                    column: tok_col,
                });
            } else {
                diagnostics.push(ParseDiagnostic {
                    line: tok_line,
                    column: tok_col,
                    message: "found '>' without '='; the only comparison operator is '>='"
                        .to_string(),
                    severity: Severity::Error,
                });
            }
            continue;
        }
        if is_word_char(c) {
            let mut word = String::new();
            while let Some(&c) = chars.peek() {
                if !is_word_char(c) {
                    break;
                }
                word.push(c);
                chars.next();
                bump!(c);
            }
            tokens.push(Token {
                kind: classify(&word),
                text: word,
                line: tok_line,
                column: tok_col,
            });
            continue;
        }
        chars.next();
        bump!(c);
        diagnostics.push(ParseDiagnostic {
            line: tok_line,
            column: tok_col,
            message: format!("illegal character {c:?}"),
            severity: Severity::Error,
        });
    }

    (tokens, diagnostics)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(source: &str) -> Vec<TokenKind> {
        let (tokens, diags) = tokenize(source);
        assert!(diags.is_empty(), "unexpected diagnostics: {diags:?}");
        tokens.into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn keyword_then_identifier() {
        let (tokens, diags) = tokenize("ALGORITHM aes-128-cbc");
        assert!(diags.is_empty());
        assert_eq!(tokens.len(), 2);
        assert_eq!(tokens[0].kind, TokenKind::Algorithm);
        assert_eq!(tokens[1].kind, TokenKind::Ident);
        assert_eq!(tokens[1].text, "aes-128-cbc");
    }

    #[test]
    fn whitespace_and_case_do_not_matter() {
        let with_breaks = kinds("algorithm\n\t aes-128-cbc");
        let flat = kinds("ALGORITHM aes-128-cbc");
        assert_eq!(with_breaks, flat);
    }

    #[test]
    fn empty_input_yields_no_tokens() {
        let (tokens, diags) = tokenize("");
        assert!(tokens.is_empty());
        assert!(diags.is_empty());
    }

    #[test]
    fn comments_are_skipped() {
        let toks = kinds("# header\nCipher # trailing\nALGORITHM x");
        assert_eq!(
            toks,
            vec![TokenKind::Ident, TokenKind::Algorithm, TokenKind::Ident]
        );
    }

    #[test]
    fn numbers_and_punctuation() {
        let toks = kinds("LENGTH IN [16, 24] ITERATIONS >= 10000");
        assert_eq!(
            toks,
            vec![
                TokenKind::Length,
                TokenKind::In,
                TokenKind::LBracket,
                TokenKind::Number,
                TokenKind::Comma,
                TokenKind::Number,
                TokenKind::RBracket,
                TokenKind::Iterations,
                TokenKind::Ge,
                TokenKind::Number,
            ]
        );
    }

    #[test]
    fn illegal_character_is_reported_with_position() {
        let (tokens, diags) = tokenize("Cipher\n  @ ALGORITHM x");
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].line, 2);
        assert_eq!(diags[0].column, 3);
        // lexing continues past the bad character
        assert_eq!(tokens.len(), 3);
    }

    #[test]
    fn word_starting_with_digit_but_not_numeric_is_an_identifier() {
        let (tokens, _) = tokenize("3des");
        assert_eq!(tokens[0].kind, TokenKind::Ident);
        assert_eq!(tokens[0].text, "3des");
    }

    #[test]
    fn positions_track_lines_and_columns() {
        let (tokens, _) = tokenize("Cipher\n  ALGORITHM aes");
        assert_eq!((tokens[0].line, tokens[0].column), (1, 1));
        assert_eq!((tokens[1].line, tokens[1].column), (2, 3));
        assert_eq!((tokens[2].line, tokens[2].column), (2, 13));
    }
}
