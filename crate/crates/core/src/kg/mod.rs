//! Indexed triple store with subclass inference and fuzzy label lookup.

mod graph;
mod label;
pub mod ntriples;
mod term;
pub mod vocab;

use thiserror::Error;

pub use graph::{Graph, Pattern};
pub use label::{closest_label, edit_distance, LabelMatch};
pub use term::{format_decimal, quote_text, Iri, Literal, Term, Triple};
pub use vocab::{seed_tbox, PrefixTable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KgError {
    #[error("invalid IRI {0:?}")]
    InvalidIri(String),
    #[error("decimal literals must be finite")]
    NonFiniteDecimal,
    #[error("inference is stale; materialize before reading")]
    NotMaterialized,
    #[error("no labelled instances of {0}")]
    NoCandidates(String),
    #[error("line {line}: {reason}")]
    Import { line: usize, reason: String },
}
