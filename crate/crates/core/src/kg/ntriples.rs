//! Line-oriented import/export: `<s> <p> o .` per line.
//!
//! Text literals are double-quoted with backslash escapes. Numbers are bare:
//! a `.` or exponent marks a decimal, otherwise the value is an integer.

use std::fmt::Write as _;

use super::graph::Graph;
use super::term::{Iri, Literal, Term, Triple};
use super::KgError;

/// Asserted triples only, one per line, in serialized order.
pub fn export(graph: &Graph) -> String {
    let mut triples: Vec<&Triple> = graph.asserted().collect();
    triples.sort_by(|a, b| a.cmp_serialized(b));
    let mut out = String::new();
    for t in triples {
        let _ = writeln!(out, "{t}");
    }
    out
}

pub fn import(text: &str, graph: &mut Graph) -> Result<usize, KgError> {
    let mut added = 0;
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let t = parse_line(line).map_err(|reason| KgError::Import { line: idx + 1, reason })?;
        if graph.insert(t) {
            added += 1;
        }
    }
    Ok(added)
}

pub fn parse_line(line: &str) -> Result<Triple, String> {
    let mut rest = line;
    let subject = take_iri(&mut rest)?;
    let predicate = take_iri(&mut rest)?;
    rest = rest.trim_start();
    let object = if rest.starts_with('<') {
        Term::Iri(take_iri(&mut rest)?)
    } else if rest.starts_with('"') {
        Term::Literal(take_text(&mut rest)?)
    } else {
        let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
        let (tok, tail) = rest.split_at(end);
        rest = tail;
        Term::Literal(parse_number(tok)?)
    };
    if rest.trim() != "." {
        return Err(format!("expected terminating '.', found {:?}", rest.trim()));
    }
    Ok(Triple::new(subject, predicate, object))
}

fn take_iri(rest: &mut &str) -> Result<Iri, String> {
    let s = rest.trim_start();
    let body = s.strip_prefix('<').ok_or_else(|| format!("expected '<' at {s:?}"))?;
    let end = body.find('>').ok_or("unterminated IRI")?;
    let iri = Iri::new(&body[..end]).map_err(|e| e.to_string())?;
    *rest = &body[end + 1..];
    Ok(iri)
}

fn take_text(rest: &mut &str) -> Result<Literal, String> {
    let mut out = String::new();
    let mut chars = rest.char_indices().skip(1);
    while let Some((i, c)) = chars.next() {
        match c {
            '"' => {
                *rest = &rest[i + 1..];
                return Ok(Literal::text(out));
            }
            '\\' => match chars.next().map(|(_, e)| e) {
                Some('"') => out.push('"'),
                Some('\\') => out.push('\\'),
                Some('n') => out.push('\n'),
                Some('r') => out.push('\r'),
                Some('t') => out.push('\t'),
                other => return Err(format!("bad escape {other:?}")),
            },
            c => out.push(c),
        }
    }
    Err("unterminated string literal".into())
}

pub fn parse_number(tok: &str) -> Result<Literal, String> {
    if tok.contains(['.', 'e', 'E']) {
        let v: f64 = tok.parse().map_err(|_| format!("bad decimal {tok:?}"))?;
        Literal::decimal(v).map_err(|e| e.to_string())
    } else {
        tok.parse::<i64>().map(Literal::Integer).map_err(|_| format!("bad literal {tok:?}"))
    }
}
