use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use super::KgError;

/// An absolute IRI. Cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Iri(Arc<str>);

impl Iri {
    pub fn new(absolute: impl AsRef<str>) -> Result<Self, KgError> {
        let s = absolute.as_ref();
        if s.is_empty() || s.chars().any(|c| c.is_whitespace() || c == '<' || c == '>' || c == '"') {
            return Err(KgError::InvalidIri(s.to_string()));
        }
        Ok(Iri(Arc::from(s)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

/// Literal payload. Decimals are always finite, and `-0.0` is stored as `0.0`.
///
/// Numeric literals compare by value: `Integer(3) == Decimal(3.0)`.
#[derive(Clone, Debug)]
pub enum Literal {
    Text(Arc<str>),
    Decimal(f64),
    Integer(i64),
}

impl Literal {
    pub fn text(s: impl AsRef<str>) -> Self {
        Literal::Text(Arc::from(s.as_ref()))
    }

    pub fn decimal(v: f64) -> Result<Self, KgError> {
        if !v.is_finite() {
            return Err(KgError::NonFiniteDecimal);
        }
        Ok(Literal::Decimal(if v == 0.0 { 0.0 } else { v }))
    }

    pub fn integer(v: i64) -> Self {
        Literal::Integer(v)
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Literal::Decimal(v) => Some(*v),
            Literal::Integer(v) => Some(*v as f64),
            Literal::Text(_) => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Literal::Text(s) => Some(s),
            _ => None,
        }
    }

    /// Integral decimals that fit an i64 exactly, used to unify numeric equality.
    fn integral_value(&self) -> Option<i64> {
        match self {
            Literal::Integer(v) => Some(*v),
            Literal::Decimal(d) => {
                if d.fract() == 0.0 && *d >= -9.223_372_036_854_776e18 && *d < 9.223_372_036_854_776e18 {
                    Some(*d as i64)
                } else {
                    None
                }
            }
            Literal::Text(_) => None,
        }
    }

    pub fn serialize(&self) -> String {
        match self {
            Literal::Text(s) => quote_text(s),
            Literal::Integer(v) => v.to_string(),
            Literal::Decimal(v) => format_decimal(*v),
        }
    }
}

impl PartialEq for Literal {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Literal::Text(a), Literal::Text(b)) => a == b,
            (Literal::Decimal(a), Literal::Decimal(b)) => a.to_bits() == b.to_bits(),
            (Literal::Integer(a), Literal::Integer(b)) => a == b,
            (Literal::Text(_), _) | (_, Literal::Text(_)) => false,
            (a, b) => matches!((a.integral_value(), b.integral_value()), (Some(x), Some(y)) if x == y),
        }
    }
}

impl Eq for Literal {}

impl Hash for Literal {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Literal::Text(s) => {
                0u8.hash(state);
                s.hash(state);
            }
            other => match other.integral_value() {
                Some(i) => {
                    1u8.hash(state);
                    i.hash(state);
                }
                None => {
                    2u8.hash(state);
                    other.as_f64().unwrap_or_default().to_bits().hash(state);
                }
            },
        }
    }
}

/// Shortest round-trip form, always carrying a `.` or exponent so it re-reads as a decimal.
pub fn format_decimal(v: f64) -> String {
    let s = format!("{v:?}");
    if s.contains(['.', 'e', 'E']) {
        s
    } else {
        format!("{s}.0")
    }
}

pub fn quote_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Iri(Iri),
    Literal(Literal),
}

impl Term {
    pub fn text(s: impl AsRef<str>) -> Self {
        Term::Literal(Literal::text(s))
    }

    pub fn integer(v: i64) -> Self {
        Term::Literal(Literal::Integer(v))
    }

    pub fn decimal(v: f64) -> Result<Self, KgError> {
        Literal::decimal(v).map(Term::Literal)
    }

    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(i) => Some(i),
            Term::Literal(_) => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(l) => Some(l),
            Term::Iri(_) => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        self.as_literal().and_then(Literal::as_f64)
    }

    pub fn as_text(&self) -> Option<&str> {
        self.as_literal().and_then(Literal::as_text)
    }

    /// N-Triples style form: `<iri>`, `"text"`, `3`, `80.0`.
    pub fn serialize(&self) -> String {
        match self {
            Term::Iri(i) => format!("<{}>", i.as_str()),
            Term::Literal(l) => l.serialize(),
        }
    }

    /// Lexicographic order on the serialized form.
    pub fn cmp_serialized(&self, other: &Term) -> Ordering {
        match (self, other) {
            (Term::Iri(a), Term::Iri(b)) => a.as_str().cmp(b.as_str()),
            _ => self.serialize().cmp(&other.serialize()),
        }
    }
}

impl From<Iri> for Term {
    fn from(i: Iri) -> Self {
        Term::Iri(i)
    }
}

impl From<Literal> for Term {
    fn from(l: Literal) -> Self {
        Term::Literal(l)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Triple {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Iri, predicate: Iri, object: impl Into<Term>) -> Self {
        Triple { subject, predicate, object: object.into() }
    }

    pub fn cmp_serialized(&self, other: &Triple) -> Ordering {
        self.subject
            .as_str()
            .cmp(other.subject.as_str())
            .then_with(|| self.predicate.as_str().cmp(other.predicate.as_str()))
            .then_with(|| self.object.cmp_serialized(&other.object))
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}
