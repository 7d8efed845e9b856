//! Syntax tree for parsed rule files.
//!
//! Every node carries the source position it was parsed from so that rule
//! violations can point back into the rule file. Positions and source names
//! are diagnostic metadata: the hand-written `PartialEq` impls below compare
//! structure only, which is what the parse/unparse round-trip guarantees
//! preserve.

/// 1-based source position of a clause or section header.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub line: u32,
    pub column: u32,
}

impl Span {
    pub fn new(line: u32, column: u32) -> Self {
        Span { line, column }
    }
}

/// A parsed rule file: an ordered list of sections.
#[derive(Debug, Clone, Default)]
pub struct RuleFile {
    pub sections: Vec<Section>,
    /// Where the text came from (a path, or a placeholder such as
    /// `<embedded default>`); used in diagnostics and violation messages.
    pub source_name: String,
}

impl PartialEq for RuleFile {
    fn eq(&self, other: &Self) -> bool {
        self.sections == other.sections
    }
}

impl Eq for RuleFile {}

/// Constraints for one task class (`Cipher`, `Hash`, ...), in source order.
#[derive(Debug, Clone)]
pub struct Section {
    pub class_name: String,
    pub constraints: Vec<Constraint>,
    pub span: Span,
}

impl PartialEq for Section {
    fn eq(&self, other: &Self) -> bool {
        self.class_name == other.class_name && self.constraints == other.constraints
    }
}

impl Eq for Section {}

/// One constraint clause inside a section.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constraint {
    /// `ALGORITHM x` or `ALGORITHM IN [...]`: the whitelist of algorithms
    /// allowed for the task. The first entry is the secure default.
    Algorithms(AlgorithmWhitelist),
    /// `IV` followed by length rules.
    Iv(IvBlock),
    /// `SYMMETRICKEY` followed by length rules and optional minimums for
    /// key-derivation iterations and salt length.
    SymmetricKey(SymmetricKeyBlock),
    /// A bare `LENGTH` clause constraining the section's primary object,
    /// e.g. the modulus size of a `KeyPair` section. In source text a bare
    /// clause can only appear before any `IV`/`SYMMETRICKEY` block of its
    /// section — after one it would read as part of that block — so
    /// hand-built files must keep that order for the text round trip to
    /// hold.
    Length(ConditionalLength),
}

#[derive(Debug, Clone)]
pub struct AlgorithmWhitelist {
    /// Non-empty, duplicate-free, order-significant (first = default).
    pub algorithms: Vec<String>,
    pub span: Span,
}

impl PartialEq for AlgorithmWhitelist {
    fn eq(&self, other: &Self) -> bool {
        self.algorithms == other.algorithms
    }
}

impl Eq for AlgorithmWhitelist {}

#[derive(Debug, Clone)]
pub struct IvBlock {
    pub rules: Vec<ConditionalLength>,
    pub span: Span,
}

impl PartialEq for IvBlock {
    fn eq(&self, other: &Self) -> bool {
        self.rules == other.rules
    }
}

impl Eq for IvBlock {}

#[derive(Debug, Clone)]
pub struct SymmetricKeyBlock {
    /// Length rules come first in the source, mirroring the grammar; the
    /// order of rules decides which one wins when several match.
    pub length_rules: Vec<ConditionalLength>,
    pub min_iterations: Option<BoundClause>,
    pub min_salt_length: Option<BoundClause>,
    pub span: Span,
}

impl PartialEq for SymmetricKeyBlock {
    fn eq(&self, other: &Self) -> bool {
        self.length_rules == other.length_rules
            && self.min_iterations == other.min_iterations
            && self.min_salt_length == other.min_salt_length
    }
}

impl Eq for SymmetricKeyBlock {}

/// `ITERATIONS >= n` or `SALTLENGTH >= n`.
#[derive(Debug, Clone)]
pub struct BoundClause {
    pub value: u64,
    pub span: Span,
}

impl PartialEq for BoundClause {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl Eq for BoundClause {}

/// `LENGTH n`, `LENGTH IN [...]`, optionally guarded by
/// `IF ALGORITHM ...`. Lengths are byte counts; the first listed length is
/// the default and every listed length is acceptable.
#[derive(Debug, Clone)]
pub struct ConditionalLength {
    /// Non-empty, duplicate-free, positive.
    pub lengths: Vec<u64>,
    pub condition: Option<AlgorithmCondition>,
    pub span: Span,
}

impl PartialEq for ConditionalLength {
    fn eq(&self, other: &Self) -> bool {
        self.lengths == other.lengths && self.condition == other.condition
    }
}

impl Eq for ConditionalLength {}

/// The algorithms under which a conditional constraint applies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgorithmCondition {
    /// Non-empty, duplicate-free.
    pub algorithms: Vec<String>,
}

impl RuleFile {
    pub fn section(&self, class_name: &str) -> Option<&Section> {
        self.sections
            .iter()
            .find(|s| s.class_name.eq_ignore_ascii_case(class_name))
    }
}

impl Section {
    pub fn whitelist(&self) -> Option<&AlgorithmWhitelist> {
        self.constraints.iter().find_map(|c| match c {
            Constraint::Algorithms(w) => Some(w),
            _ => None,
        })
    }
}
