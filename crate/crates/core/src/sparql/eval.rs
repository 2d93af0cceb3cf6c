use std::collections::{HashMap, HashSet};

use super::ast::{BindingRow, IriOrVar, Query, TermOrVar, TriplePattern};
use super::SparqlError;
use crate::kg::{Graph, Pattern, Term};

type Bindings = HashMap<String, Term>;

/// All distinct rows satisfying every pattern, sorted by their serialized form.
///
/// Patterns are joined left to right with backtracking.
pub fn evaluate(graph: &Graph, query: &Query) -> Result<Vec<BindingRow>, SparqlError> {
    let bound: HashSet<&str> = query.patterns.iter().flat_map(TriplePattern::vars).map(|v| v.name()).collect();
    if let Some(v) = query.select_vars.iter().find(|v| !bound.contains(v.name())) {
        return Err(SparqlError::UnboundSelectVar(v.name().to_string()));
    }
    let mut rows: HashSet<BindingRow> = HashSet::new();
    let mut bindings = Bindings::new();
    solve(graph, &query.patterns, &mut bindings, &mut |b| {
        let row: BindingRow = query.select_vars.iter().map(|v| (v.name().to_string(), b[v.name()].clone())).collect();
        rows.insert(row);
    })?;
    let mut out: Vec<BindingRow> = rows.into_iter().collect();
    out.sort_by_cached_key(row_key);
    Ok(out)
}

fn row_key(row: &BindingRow) -> Vec<String> {
    row.values().map(Term::serialize).collect()
}

fn solve(
    graph: &Graph,
    patterns: &[TriplePattern],
    bindings: &mut Bindings,
    emit: &mut dyn FnMut(&Bindings),
) -> Result<(), SparqlError> {
    let Some((first, rest)) = patterns.split_first() else {
        emit(bindings);
        return Ok(());
    };

    let resolve_iri = |x: &IriOrVar, b: &Bindings| -> Result<Option<crate::kg::Iri>, ()> {
        match x {
            IriOrVar::Iri(i) => Ok(Some(i.clone())),
            IriOrVar::Var(v) => match b.get(v.name()) {
                None => Ok(None),
                Some(Term::Iri(i)) => Ok(Some(i.clone())),
                // a literal can never sit in subject or predicate position
                Some(Term::Literal(_)) => Err(()),
            },
        }
    };
    let (Ok(s), Ok(p)) = (resolve_iri(&first.subject, bindings), resolve_iri(&first.predicate, bindings)) else {
        return Ok(());
    };
    let o = match &first.object {
        TermOrVar::Term(t) => Some(t.clone()),
        TermOrVar::Var(v) => bindings.get(v.name()).cloned(),
    };

    for t in graph.match_pattern(&Pattern::new(s, p, o))? {
        let mut added: Vec<String> = Vec::new();
        let mut ok = true;
        let slots = [
            (first.subject_var(), Term::Iri(t.subject.clone())),
            (first.predicate_var(), Term::Iri(t.predicate.clone())),
            (first.object_var(), t.object.clone()),
        ];
        for (var, value) in slots {
            let Some(name) = var else { continue };
            match bindings.get(name.as_str()) {
                Some(existing) if *existing != value => {
                    ok = false;
                    break;
                }
                Some(_) => {}
                None => {
                    bindings.insert(name.clone(), value);
                    added.push(name.clone());
                }
            }
        }
        if ok {
            solve(graph, rest, bindings, emit)?;
        }
        for name in added {
            bindings.remove(&name);
        }
    }
    Ok(())
}

impl TriplePattern {
    fn subject_var(&self) -> Option<String> {
        match &self.subject {
            IriOrVar::Var(v) => Some(v.name().to_string()),
            IriOrVar::Iri(_) => None,
        }
    }

    fn predicate_var(&self) -> Option<String> {
        match &self.predicate {
            IriOrVar::Var(v) => Some(v.name().to_string()),
            IriOrVar::Iri(_) => None,
        }
    }

    fn object_var(&self) -> Option<String> {
        match &self.object {
            TermOrVar::Var(v) => Some(v.name().to_string()),
            TermOrVar::Term(_) => None,
        }
    }
}
