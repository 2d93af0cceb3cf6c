use std::collections::HashSet;

use super::ast::{IriOrVar, Query, TermOrVar, TriplePattern, Var};
use super::SparqlError;
use crate::kg::{ntriples, vocab, Iri, Literal, PrefixTable, Term};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Word(String),
    PName(String, String),
    IriRef(String),
    Var(String),
    Text(String),
    Number(String),
    LBrace,
    RBrace,
    Dot,
    Semi,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Word(w) => w.clone(),
            Tok::PName(p, l) => format!("{p}:{l}"),
            Tok::IriRef(i) => format!("<{i}>"),
            Tok::Var(v) => format!("?{v}"),
            Tok::Text(t) => format!("{t:?}"),
            Tok::Number(n) => n.clone(),
            Tok::LBrace => "{".into(),
            Tok::RBrace => "}".into(),
            Tok::Dot => ".".into(),
            Tok::Semi => ";".into(),
            Tok::Eof => "<end of input>".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

fn is_name_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { chars: text.chars().peekable(), line: 1, column: 1 }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn err(&self, line: usize, column: usize, token: impl Into<String>) -> SparqlError {
        SparqlError::Syntax { line, column, token: token.into() }
    }

    fn take_while(&mut self, mut pred: impl FnMut(char) -> bool) -> String {
        let mut s = String::new();
        while let Some(&c) = self.chars.peek() {
            if !pred(c) {
                break;
            }
            s.push(c);
            self.bump();
        }
        s
    }

    fn tokens(mut self) -> Result<Vec<Spanned>, SparqlError> {
        let mut out = Vec::new();
        loop {
            // whitespace and comments
            loop {
                match self.chars.peek() {
                    Some(c) if c.is_whitespace() => {
                        self.bump();
                    }
                    Some('#') => {
                        self.take_while(|c| c != '\n');
                    }
                    _ => break,
                }
            }
            let (line, column) = (self.line, self.column);
            let Some(&c) = self.chars.peek() else {
                out.push(Spanned { tok: Tok::Eof, line, column });
                return Ok(out);
            };
            let tok = match c {
                '{' => {
                    self.bump();
                    Tok::LBrace
                }
                '}' => {
                    self.bump();
                    Tok::RBrace
                }
                '.' => {
                    self.bump();
                    Tok::Dot
                }
                ';' => {
                    self.bump();
                    Tok::Semi
                }
                '?' | '$' => {
                    self.bump();
                    let name = self.take_while(is_name_char);
                    if name.is_empty() || !is_name_start(name.chars().next().unwrap_or(' ')) || name.contains('-') {
                        return Err(self.err(line, column, format!("{c}{name}")));
                    }
                    Tok::Var(name)
                }
                '<' => {
                    self.bump();
                    let body = self.take_while(|c| c != '>' && !c.is_whitespace());
                    if self.bump() != Some('>') {
                        return Err(self.err(line, column, format!("<{body}")));
                    }
                    Tok::IriRef(body)
                }
                '"' | '\'' => Tok::Text(self.string(c, line, column)?),
                c if c.is_ascii_digit() || c == '-' || c == '+' => Tok::Number(self.number(line, column)?),
                c if is_name_start(c) => {
                    let word = self.take_while(is_name_char);
                    if self.chars.peek() == Some(&':') {
                        self.bump();
                        let local = self.take_while(is_name_char);
                        Tok::PName(word, local)
                    } else {
                        Tok::Word(word)
                    }
                }
                ':' => {
                    self.bump();
                    let local = self.take_while(is_name_char);
                    Tok::PName(String::new(), local)
                }
                other => return Err(self.err(line, column, other.to_string())),
            };
            out.push(Spanned { tok, line, column });
        }
    }

    fn string(&mut self, quote: char, line: usize, column: usize) -> Result<String, SparqlError> {
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => return Err(self.err(line, column, format!("{quote}{s}"))),
                Some(c) if c == quote => return Ok(s),
                Some('\\') => match self.bump() {
                    Some('n') => s.push('\n'),
                    Some('t') => s.push('\t'),
                    Some('r') => s.push('\r'),
                    Some(e @ ('"' | '\'' | '\\')) => s.push(e),
                    other => {
                        return Err(self.err(
                            self.line,
                            self.column,
                            format!("\\{}", other.map(String::from).unwrap_or_default()),
                        ))
                    }
                },
                Some(c) => s.push(c),
            }
        }
    }

    fn number(&mut self, line: usize, column: usize) -> Result<String, SparqlError> {
        let mut s = String::new();
        if let Some(&sign @ ('-' | '+')) = self.chars.peek() {
            s.push(sign);
            self.bump();
        }
        s.push_str(&self.take_while(|c| c.is_ascii_digit()));
        // a '.' only belongs to the number when a digit follows it
        let mut look = self.chars.clone();
        if look.next() == Some('.') && look.next().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
            s.push('.');
            s.push_str(&self.take_while(|c| c.is_ascii_digit()));
        }
        if matches!(self.chars.peek(), Some('e' | 'E')) {
            let mut look = self.chars.clone();
            look.next();
            let mut next = look.next();
            if matches!(next, Some('+' | '-')) {
                next = look.next();
            }
            if next.is_some_and(|c| c.is_ascii_digit()) {
                s.push(self.bump().unwrap_or('e'));
                if matches!(self.chars.peek(), Some('+' | '-')) {
                    s.push(self.bump().unwrap_or('+'));
                }
                s.push_str(&self.take_while(|c| c.is_ascii_digit()));
            }
        }
        if !s.chars().any(|c| c.is_ascii_digit()) {
            return Err(self.err(line, column, s));
        }
        Ok(s)
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn next(&mut self) -> Spanned {
        let t = self.peek().clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn unexpected(t: &Spanned) -> SparqlError {
        SparqlError::Syntax { line: t.line, column: t.column, token: t.tok.describe() }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), SparqlError> {
        let t = self.next();
        match &t.tok {
            Tok::Word(w) if w.eq_ignore_ascii_case(kw) => Ok(()),
            _ => Err(Self::unexpected(&t)),
        }
    }

    fn expect(&mut self, want: Tok) -> Result<(), SparqlError> {
        let t = self.next();
        if t.tok == want {
            Ok(())
        } else {
            Err(Self::unexpected(&t))
        }
    }

    fn iri_from(t: &Spanned) -> Result<Option<Iri>, SparqlError> {
        match &t.tok {
            Tok::PName(p, l) => {
                let ns = PrefixTable.namespace(p).ok_or_else(|| SparqlError::UnknownPrefix {
                    prefix: p.clone(),
                    line: t.line,
                    column: t.column,
                })?;
                Iri::new(format!("{ns}{l}")).map(Some).map_err(|_| Self::unexpected(t))
            }
            Tok::IriRef(i) => Iri::new(i).map(Some).map_err(|_| Self::unexpected(t)),
            _ => Ok(None),
        }
    }

    fn subject(&mut self) -> Result<IriOrVar, SparqlError> {
        let t = self.next();
        if let Tok::Var(v) = &t.tok {
            return Ok(IriOrVar::Var(Var(v.clone())));
        }
        Self::iri_from(&t)?.map(IriOrVar::Iri).ok_or_else(|| Self::unexpected(&t))
    }

    fn verb(&mut self) -> Result<IriOrVar, SparqlError> {
        let t = self.next();
        match &t.tok {
            Tok::Var(v) => Ok(IriOrVar::Var(Var(v.clone()))),
            Tok::Word(w) if w == "a" => Ok(IriOrVar::Iri(vocab::rdf_type())),
            _ => Self::iri_from(&t)?.map(IriOrVar::Iri).ok_or_else(|| Self::unexpected(&t)),
        }
    }

    fn object(&mut self) -> Result<TermOrVar, SparqlError> {
        let t = self.next();
        match &t.tok {
            Tok::Var(v) => Ok(TermOrVar::Var(Var(v.clone()))),
            Tok::Text(s) => Ok(TermOrVar::Term(Term::Literal(Literal::text(s)))),
            Tok::Number(n) => {
                ntriples::parse_number(n).map(|l| TermOrVar::Term(Term::Literal(l))).map_err(|_| Self::unexpected(&t))
            }
            _ => Self::iri_from(&t)?.map(|i| TermOrVar::Term(Term::Iri(i))).ok_or_else(|| Self::unexpected(&t)),
        }
    }

    fn query(&mut self) -> Result<Query, SparqlError> {
        self.keyword("SELECT")?;
        let mut select_vars = Vec::new();
        while let Tok::Var(v) = &self.peek().tok {
            select_vars.push(Var(v.clone()));
            self.next();
        }
        self.keyword("WHERE")?;
        self.expect(Tok::LBrace)?;
        let mut patterns = Vec::new();
        loop {
            if self.peek().tok == Tok::RBrace {
                self.next();
                break;
            }
            let subject = self.subject()?;
            loop {
                let predicate = self.verb()?;
                let object = self.object()?;
                patterns.push(TriplePattern { subject: subject.clone(), predicate, object });
                if self.peek().tok == Tok::Semi {
                    self.next();
                    continue;
                }
                break;
            }
            match self.peek().tok {
                Tok::Dot => {
                    self.next();
                }
                Tok::RBrace => {}
                _ => return Err(Self::unexpected(self.peek())),
            }
        }
        let tail = self.next();
        if tail.tok != Tok::Eof {
            return Err(Self::unexpected(&tail));
        }
        let seen: HashSet<&Var> = patterns.iter().flat_map(TriplePattern::vars).collect();
        if let Some(v) = select_vars.iter().find(|v| !seen.contains(v)) {
            return Err(SparqlError::UnboundSelectVar(v.0.clone()));
        }
        Ok(Query { select_vars, patterns })
    }
}

/// Parses the supported `SELECT … WHERE { … }` subset.
pub fn parse_query(text: &str) -> Result<Query, SparqlError> {
    let toks = Lexer::new(text).tokens()?;
    Parser { toks, pos: 0 }.query()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::vocab::{aero, label, rdf_type};

    const VALUE_QUERY: &str = r#"SELECT ?ID ?subs ?val
WHERE { ?chara rdfs:label "Speed" .
          ?subs  rdfs:label "HPC" .
          ?subs_inst a ?subs ;
                ?chara ?val ;
                aero:isPartOf ?engine .
          ?engine aero:VR_ID ?ID ;
                rdfs:label "3" .
}"#;

    #[test]
    fn value_lookup_query_expands_groups() {
        let q = parse_query(VALUE_QUERY).unwrap();
        assert_eq!(q.select_vars.iter().map(Var::name).collect::<Vec<_>>(), ["ID", "subs", "val"]);
        assert_eq!(q.patterns.len(), 7);
        assert_eq!(q.patterns[2].predicate, IriOrVar::Iri(rdf_type()));
        assert_eq!(q.patterns[3].subject, IriOrVar::Var(Var("subs_inst".into())));
        assert_eq!(q.patterns[4].predicate, IriOrVar::Iri(aero("isPartOf")));
        assert_eq!(q.patterns[6].predicate, IriOrVar::Iri(label()));
        assert_eq!(q.patterns[6].object, TermOrVar::Term(Term::text("3")));
    }

    #[test]
    fn minimal_query() {
        let q = parse_query("SELECT ?x WHERE { ?x a aero:Engine . }").unwrap();
        assert_eq!(q.select_vars.len(), 1);
        assert_eq!(q.patterns.len(), 1);
        assert_eq!(q.patterns[0].predicate, IriOrVar::Iri(rdf_type()));
    }

    #[test]
    fn final_dot_is_optional() {
        let q = parse_query("select ?x where { ?x a aero:Engine }").unwrap();
        assert_eq!(q.patterns.len(), 1);
    }

    #[test]
    fn missing_closing_brace_points_at_end() {
        let text = "SELECT ?x WHERE { ?x a aero:Engine .";
        match parse_query(text) {
            Err(SparqlError::Syntax { line, column, token }) => {
                assert_eq!((line, column), (1, text.len() + 1));
                assert_eq!(token, "<end of input>");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn extra_closing_brace_is_reported_where_it_stands() {
        match parse_query("SELECT ?x WHERE {\n ?x a aero:Engine . }\n}") {
            Err(SparqlError::Syntax { line, column, token }) => {
                assert_eq!((line, column, token.as_str()), (3, 1, "}"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_prefix_is_named() {
        assert!(matches!(
            parse_query("SELECT ?x WHERE { ?x a owl:Thing }"),
            Err(SparqlError::UnknownPrefix { prefix, .. }) if prefix == "owl"
        ));
    }

    #[test]
    fn select_var_must_occur() {
        assert_eq!(parse_query("SELECT ?y WHERE { ?x a aero:Engine }"), Err(SparqlError::UnboundSelectVar("y".into())));
    }

    #[test]
    fn literals_of_each_kind() {
        let q = parse_query("SELECT ?s WHERE { ?s aero:p 3 . ?s aero:q 80.0 . ?s aero:r -1.5e2 . ?s aero:t 'x\\'y' }")
            .unwrap();
        let objs: Vec<String> = q
            .patterns
            .iter()
            .map(|p| match &p.object {
                TermOrVar::Term(t) => t.serialize(),
                TermOrVar::Var(v) => v.to_string(),
            })
            .collect();
        assert_eq!(objs, ["3", "80.0", "-150.0", "\"x'y\""]);
    }

    #[test]
    fn integer_then_terminator() {
        let q = parse_query("SELECT ?s WHERE { ?s aero:VR_ID 3. }").unwrap();
        assert_eq!(q.patterns[0].object, TermOrVar::Term(Term::integer(3)));
    }

    #[test]
    fn literal_subject_is_rejected() {
        assert!(matches!(parse_query("SELECT ?x WHERE { \"a\" aero:p ?x }"), Err(SparqlError::Syntax { .. })));
    }
}
