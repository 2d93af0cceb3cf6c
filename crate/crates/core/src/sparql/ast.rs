use std::collections::BTreeMap;
use std::fmt;

use crate::kg::{Iri, PrefixTable, Term};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub String);

impl Var {
    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IriOrVar {
    Iri(Iri),
    Var(Var),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TermOrVar {
    Term(Term),
    Var(Var),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriplePattern {
    pub subject: IriOrVar,
    pub predicate: IriOrVar,
    pub object: TermOrVar,
}

impl TriplePattern {
    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        let s = match &self.subject {
            IriOrVar::Var(v) => Some(v),
            IriOrVar::Iri(_) => None,
        };
        let p = match &self.predicate {
            IriOrVar::Var(v) => Some(v),
            IriOrVar::Iri(_) => None,
        };
        let o = match &self.object {
            TermOrVar::Var(v) => Some(v),
            TermOrVar::Term(_) => None,
        };
        s.into_iter().chain(p).chain(o)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub select_vars: Vec<Var>,
    pub patterns: Vec<TriplePattern>,
}

impl Query {
    /// Canonical text form: one full triple per line, prefixed names where possible.
    pub fn serialize(&self) -> String {
        let mut out = String::from("SELECT");
        for v in &self.select_vars {
            out.push(' ');
            out.push_str(&v.to_string());
        }
        out.push_str("\nWHERE {\n");
        for p in &self.patterns {
            out.push_str("  ");
            out.push_str(&write_iri_or_var(&p.subject));
            out.push(' ');
            out.push_str(&write_iri_or_var(&p.predicate));
            out.push(' ');
            out.push_str(&match &p.object {
                TermOrVar::Var(v) => v.to_string(),
                TermOrVar::Term(t) => write_term(t),
            });
            out.push_str(" .\n");
        }
        out.push('}');
        out
    }
}

fn write_iri_or_var(x: &IriOrVar) -> String {
    match x {
        IriOrVar::Iri(i) => write_iri(i),
        IriOrVar::Var(v) => v.to_string(),
    }
}

pub(crate) fn write_iri(i: &Iri) -> String {
    PrefixTable.compact(i).unwrap_or_else(|| format!("<{}>", i.as_str()))
}

/// Query-syntax form of a term (prefixed IRIs, quoted text, bare numbers).
pub fn write_term(t: &Term) -> String {
    match t {
        Term::Iri(i) => write_iri(i),
        Term::Literal(l) => l.serialize(),
    }
}

/// One result row: variable name to bound term.
pub type BindingRow = BTreeMap<String, Term>;
