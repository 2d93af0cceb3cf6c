use std::collections::{HashMap, HashSet};

use super::term::{Iri, Term, Triple};
use super::vocab::{is_subclass_of, rdf_type};
use super::KgError;

/// A triple pattern with optional positions. `None` is a wildcard.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Pattern {
    pub subject: Option<Iri>,
    pub predicate: Option<Iri>,
    pub object: Option<Term>,
}

impl Pattern {
    pub fn new(subject: Option<Iri>, predicate: Option<Iri>, object: Option<Term>) -> Self {
        Pattern { subject, predicate, object }
    }

    pub fn any() -> Self {
        Pattern::default()
    }

    pub fn matches(&self, t: &Triple) -> bool {
        self.subject.as_ref().is_none_or(|s| *s == t.subject)
            && self.predicate.as_ref().is_none_or(|p| *p == t.predicate)
            && self.object.as_ref().is_none_or(|o| *o == t.object)
    }
}

type Spo = HashMap<Iri, HashMap<Iri, HashSet<Term>>>;
type Pos = HashMap<Iri, HashMap<Term, HashSet<Iri>>>;
type Osp = HashMap<Term, HashMap<Iri, HashSet<Iri>>>;

#[derive(Clone, Debug, Default)]
struct Indexes {
    spo: Spo,
    pos: Pos,
    osp: Osp,
}

impl Indexes {
    fn add(&mut self, t: &Triple) {
        self.spo.entry(t.subject.clone()).or_default().entry(t.predicate.clone()).or_default().insert(t.object.clone());
        self.pos.entry(t.predicate.clone()).or_default().entry(t.object.clone()).or_default().insert(t.subject.clone());
        self.osp.entry(t.object.clone()).or_default().entry(t.subject.clone()).or_default().insert(t.predicate.clone());
    }

    fn remove(&mut self, t: &Triple) {
        fn drop_leaf<A, B, C>(map: &mut HashMap<A, HashMap<B, HashSet<C>>>, a: &A, b: &B, c: &C)
        where
            A: std::hash::Hash + Eq,
            B: std::hash::Hash + Eq,
            C: std::hash::Hash + Eq,
        {
            if let Some(inner) = map.get_mut(a) {
                if let Some(leaf) = inner.get_mut(b) {
                    leaf.remove(c);
                    if leaf.is_empty() {
                        inner.remove(b);
                    }
                }
                if inner.is_empty() {
                    map.remove(a);
                }
            }
        }
        drop_leaf(&mut self.spo, &t.subject, &t.predicate, &t.object);
        drop_leaf(&mut self.pos, &t.predicate, &t.object, &t.subject);
        drop_leaf(&mut self.osp, &t.object, &t.subject, &t.predicate);
    }

    fn lookup(&self, p: &Pattern) -> Vec<Triple> {
        let mk = |s: &Iri, pr: &Iri, o: &Term| Triple::new(s.clone(), pr.clone(), o.clone());
        match (&p.subject, &p.predicate, &p.object) {
            (Some(s), Some(pr), Some(o)) => self
                .spo
                .get(s)
                .and_then(|m| m.get(pr))
                .and_then(|objs| objs.get(o))
                .map(|stored| vec![mk(s, pr, stored)])
                .unwrap_or_default(),
            (Some(s), Some(pr), None) => self
                .spo
                .get(s)
                .and_then(|m| m.get(pr))
                .map(|objs| objs.iter().map(|o| mk(s, pr, o)).collect())
                .unwrap_or_default(),
            (Some(s), None, None) => self
                .spo
                .get(s)
                .map(|m| m.iter().flat_map(|(pr, objs)| objs.iter().map(move |o| mk(s, pr, o))).collect())
                .unwrap_or_default(),
            (None, Some(pr), Some(o)) => self
                .pos
                .get(pr)
                .and_then(|m| m.get_key_value(o))
                .map(|(stored, subs)| subs.iter().map(|s| mk(s, pr, stored)).collect())
                .unwrap_or_default(),
            (None, Some(pr), None) => self
                .pos
                .get(pr)
                .map(|m| m.iter().flat_map(|(o, subs)| subs.iter().map(move |s| mk(s, pr, o))).collect())
                .unwrap_or_default(),
            (Some(s), None, Some(o)) => self
                .osp
                .get_key_value(o)
                .and_then(|(stored, m)| m.get(s).map(|preds| (stored, preds)))
                .map(|(stored, preds)| preds.iter().map(|pr| mk(s, pr, stored)).collect())
                .unwrap_or_default(),
            (None, None, Some(o)) => self
                .osp
                .get_key_value(o)
                .map(|(stored, m)| {
                    m.iter().flat_map(|(s, preds)| preds.iter().map(move |pr| mk(s, pr, stored))).collect()
                })
                .unwrap_or_default(),
            (None, None, None) => self
                .spo
                .iter()
                .flat_map(|(s, m)| m.iter().flat_map(move |(pr, objs)| objs.iter().map(move |o| mk(s, pr, o))))
                .collect(),
        }
    }
}

/// In-memory triple store with asserted and inferred triples and three indexes.
///
/// Inference covers subclass transitivity and type propagation over
/// `aero:isSubclassOf`. It is recomputed by [`Graph::materialize`] whenever a
/// mutation marks the graph dirty.
#[derive(Clone, Debug, Default)]
pub struct Graph {
    asserted: HashSet<Triple>,
    inferred: HashSet<Triple>,
    index: Indexes,
    dirty: bool,
}

impl Graph {
    pub fn new() -> Self {
        Graph::default()
    }

    pub fn len(&self) -> usize {
        self.asserted.len() + self.inferred.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn asserted_len(&self) -> usize {
        self.asserted.len()
    }

    pub fn is_dirty(&self) -> bool {
        self.dirty
    }

    fn feeds_inference(t: &Triple) -> bool {
        t.predicate == is_subclass_of() || t.predicate == rdf_type()
    }

    /// Returns `true` when the triple was not asserted before.
    pub fn insert(&mut self, t: Triple) -> bool {
        if self.asserted.contains(&t) {
            return false;
        }
        if Self::feeds_inference(&t) {
            self.dirty = true;
        }
        if !self.inferred.remove(&t) {
            self.index.add(&t);
        }
        self.asserted.insert(t);
        true
    }

    /// Removes all asserted triples matching `pattern`.
    pub fn remove_matching(&mut self, pattern: &Pattern) -> usize {
        let doomed: Vec<Triple> = self.asserted.iter().filter(|t| pattern.matches(t)).cloned().collect();
        for t in &doomed {
            self.asserted.remove(t);
            self.index.remove(t);
        }
        self.dirty = true;
        doomed.len()
    }

    /// Triples in asserted ∪ inferred matching `pattern`, sorted by serialized form.
    pub fn match_pattern(&self, pattern: &Pattern) -> Result<Vec<Triple>, KgError> {
        if self.dirty {
            return Err(KgError::NotMaterialized);
        }
        Ok(self.lookup_sorted(pattern))
    }

    /// Like [`Graph::match_pattern`] but ignores inferred triples; never fails.
    pub fn match_asserted(&self, pattern: &Pattern) -> Vec<Triple> {
        let mut out: Vec<Triple> = self.asserted.iter().filter(|t| pattern.matches(t)).cloned().collect();
        out.sort_by(Triple::cmp_serialized);
        out
    }

    fn lookup_sorted(&self, pattern: &Pattern) -> Vec<Triple> {
        let mut out = self.index.lookup(pattern);
        out.sort_by(Triple::cmp_serialized);
        out
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.asserted.contains(t) || self.inferred.contains(t)
    }

    pub fn is_asserted(&self, t: &Triple) -> bool {
        self.asserted.contains(t)
    }

    pub fn asserted(&self) -> impl Iterator<Item = &Triple> {
        self.asserted.iter()
    }

    pub fn inferred(&self) -> impl Iterator<Item = &Triple> {
        self.inferred.iter()
    }

    /// Recomputes the inferred set as the fixpoint of
    /// `A ⊑ B ∧ B ⊑ C ⇒ A ⊑ C` and `x : A ∧ A ⊑ B ⇒ x : B`.
    pub fn materialize(&mut self) {
        if !self.dirty {
            return;
        }
        for t in self.inferred.drain() {
            self.index.remove(&t);
        }
        let sub = is_subclass_of();
        let ty = rdf_type();

        // superclass closure; literal objects are terminal nodes
        let mut direct: HashMap<Iri, Vec<Term>> = HashMap::new();
        for t in &self.asserted {
            if t.predicate == sub {
                direct.entry(t.subject.clone()).or_default().push(t.object.clone());
            }
        }
        let mut closure: HashMap<Iri, HashSet<Term>> = HashMap::new();
        for start in direct.keys() {
            let mut seen: HashSet<Term> = HashSet::new();
            let mut stack: Vec<Term> = direct[start].clone();
            while let Some(c) = stack.pop() {
                if seen.insert(c.clone()) {
                    if let Some(next) = c.as_iri().and_then(|i| direct.get(i)) {
                        stack.extend(next.iter().cloned());
                    }
                }
            }
            closure.insert(start.clone(), seen);
        }

        let mut derived: Vec<Triple> = Vec::new();
        for (a, supers) in &closure {
            for b in supers {
                derived.push(Triple::new(a.clone(), sub.clone(), b.clone()));
            }
        }
        for t in &self.asserted {
            if t.predicate == ty {
                if let Term::Iri(class) = &t.object {
                    if let Some(supers) = closure.get(class) {
                        for b in supers {
                            derived.push(Triple::new(t.subject.clone(), ty.clone(), b.clone()));
                        }
                    }
                }
            }
        }
        for t in derived {
            if !self.asserted.contains(&t) && self.inferred.insert(t.clone()) {
                self.index.add(&t);
            }
        }
        self.dirty = false;
    }

    /// Every distinct term occurring in the graph (asserted and inferred).
    pub fn terms(&self) -> HashSet<Term> {
        let mut out = HashSet::new();
        for t in self.asserted.iter().chain(self.inferred.iter()) {
            out.insert(Term::Iri(t.subject.clone()));
            out.insert(Term::Iri(t.predicate.clone()));
            out.insert(t.object.clone());
        }
        out
    }
}
