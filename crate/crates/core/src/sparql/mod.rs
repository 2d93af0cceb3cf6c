//! The `SELECT … WHERE { … }` subset used by the per-intent query templates.
//!
//! Supported: triple patterns terminated by `.`, `;` continuation sharing a
//! subject, `a` for `rdf:type`, prefixed names from the fixed prefix table,
//! `<absolute>` IRIs, quoted text, bare integers/decimals and `?var`.
//! No FILTER, OPTIONAL, LIMIT or aggregates.

mod ast;
mod eval;
mod parser;
mod template;

use thiserror::Error;

use crate::kg::KgError;

pub use ast::{write_term, BindingRow, IriOrVar, Query, TermOrVar, TriplePattern, Var};
pub use eval::evaluate;
pub use parser::parse_query;
pub use template::{QueryTemplate, TemplateSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SparqlError {
    #[error("syntax error at {line}:{column} near {token:?}")]
    Syntax { line: usize, column: usize, token: String },
    #[error("unknown prefix {prefix:?} at {line}:{column}")]
    UnknownPrefix { prefix: String, line: usize, column: usize },
    #[error("selected variable ?{0} does not occur in any pattern")]
    UnboundSelectVar(String),
    #[error("no value for placeholder [{0}]")]
    MissingPlaceholder(String),
    #[error(transparent)]
    Graph(#[from] KgError),
}
