// The guide's code blocks run as doctests so the book and the library can
// never drift apart. Collected only when rustdoc gathers doctests.

#[doc = include_str!("../../../book/src/getting-started.md")]
mod getting_started {}

#[doc = include_str!("../../../book/src/rule-language.md")]
mod rule_language {}

#[doc = include_str!("../../../book/src/fluent-builders.md")]
mod fluent_builders {}

#[doc = include_str!("../../../book/src/validation-and-errors.md")]
mod validation_and_errors {}

#[doc = include_str!("../../../book/src/keys-and-derivation.md")]
mod keys_and_derivation {}

#[doc = include_str!("../../../book/src/asymmetric.md")]
mod asymmetric {}

#[doc = include_str!("../../../book/src/embedding.md")]
mod embedding {}
