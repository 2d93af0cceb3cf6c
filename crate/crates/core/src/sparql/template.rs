use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use super::ast::write_term;
use super::SparqlError;
use crate::kg::Term;

/// Query text with `[UPPER_CASE]` placeholders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryTemplate {
    text: String,
}

impl QueryTemplate {
    pub fn new(text: impl Into<String>) -> Self {
        QueryTemplate { text: text.into() }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// Placeholder names in order of first appearance.
    pub fn placeholders(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for (_, name, _) in scan(&self.text) {
            if !out.iter().any(|n| n == name) {
                out.push(name.to_string());
            }
        }
        out
    }

    /// Substitutes serialized terms for every placeholder.
    ///
    /// Values are written as query terms, never spliced as raw text, so a
    /// slot containing quotes or braces stays inside its literal.
    pub fn instantiate(&self, slots: &BTreeMap<String, Term>) -> Result<String, SparqlError> {
        let mut out = String::with_capacity(self.text.len());
        let mut last = 0;
        for (start, name, end) in scan(&self.text) {
            let value = slots.get(name).ok_or_else(|| SparqlError::MissingPlaceholder(name.to_string()))?;
            out.push_str(&self.text[last..start]);
            out.push_str(&write_term(value));
            last = end;
        }
        out.push_str(&self.text[last..]);
        Ok(out)
    }
}

/// `(start, name, end)` byte ranges of `[NAME]` markers.
fn scan(text: &str) -> Vec<(usize, &str, usize)> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'[' {
            let mut j = i + 1;
            while j < bytes.len() && (bytes[j].is_ascii_uppercase() || bytes[j].is_ascii_digit() || bytes[j] == b'_') {
                j += 1;
            }
            if j > i + 1 && j < bytes.len() && bytes[j] == b']' && bytes[i + 1].is_ascii_uppercase() {
                out.push((i, &text[i + 1..j], j + 1));
                i = j + 1;
                continue;
            }
        }
        i += 1;
    }
    out
}

/// One template per intent, keyed by intent name.
#[derive(Clone, Debug, Default)]
pub struct TemplateSet {
    templates: BTreeMap<String, QueryTemplate>,
}

impl TemplateSet {
    pub fn insert(&mut self, intent: impl Into<String>, template: QueryTemplate) {
        self.templates.insert(intent.into(), template);
    }

    pub fn get(&self, intent: &str) -> Option<&QueryTemplate> {
        self.templates.get(intent)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &QueryTemplate)> {
        self.templates.iter()
    }

    /// Reads every `<intent>.rq` file in `dir`.
    pub fn load_dir(dir: &Path) -> std::io::Result<Self> {
        let mut set = TemplateSet::default();
        let mut entries: Vec<_> = fs::read_dir(dir)?.collect::<Result<_, _>>()?;
        entries.sort_by_key(|e| e.path());
        for entry in entries {
            let path = entry.path();
            if path.extension().and_then(|e| e.to_str()) != Some("rq") {
                continue;
            }
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                set.insert(stem, QueryTemplate::new(fs::read_to_string(&path)?));
            }
        }
        Ok(set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::vocab::aero;
    use crate::sparql::{parse_query, TermOrVar};
    use proptest::prelude::*;

    const VALUE_TEMPLATE: &str = r#"SELECT ?ID ?subs ?val
WHERE { ?chara rdfs:label [CHARACTERISTIC] .
          ?subs  rdfs:label [SUBSYSTEM] .
          ?subs_inst a ?subs ;
                ?chara ?val ;
                aero:isPartOf ?engine .
          ?engine aero:VR_ID ?ID ;
                rdfs:label [ENGINE_NAME] .
}"#;

    fn slots(pairs: &[(&str, Term)]) -> BTreeMap<String, Term> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn value_template_instantiates_to_parseable_query() {
        let t = QueryTemplate::new(VALUE_TEMPLATE);
        assert_eq!(t.placeholders(), ["CHARACTERISTIC", "SUBSYSTEM", "ENGINE_NAME"]);
        let text = t
            .instantiate(&slots(&[
                ("CHARACTERISTIC", Term::text("Speed")),
                ("SUBSYSTEM", Term::text("HPC")),
                ("ENGINE_NAME", Term::text("3")),
            ]))
            .unwrap();
        assert!(text.contains(r#"rdfs:label "Speed""#));
        assert_eq!(parse_query(&text).unwrap().patterns.len(), 7);
    }

    #[test]
    fn no_placeholders_is_identity() {
        let t = QueryTemplate::new("SELECT ?x WHERE { ?x a aero:Engine }");
        assert_eq!(t.instantiate(&BTreeMap::new()).unwrap(), t.text());
    }

    #[test]
    fn missing_placeholder_is_named() {
        let t = QueryTemplate::new(VALUE_TEMPLATE);
        let err = t
            .instantiate(&slots(&[("CHARACTERISTIC", Term::text("Speed")), ("SUBSYSTEM", Term::text("HPC"))]))
            .unwrap_err();
        assert_eq!(err, SparqlError::MissingPlaceholder("ENGINE_NAME".into()));
    }

    #[test]
    fn iris_are_written_compactly() {
        let t = QueryTemplate::new("SELECT ?x WHERE { ?x a [CLASS] }");
        let text = t.instantiate(&slots(&[("CLASS", Term::Iri(aero("HPC")))])).unwrap();
        assert_eq!(text, "SELECT ?x WHERE { ?x a aero:HPC }");
    }

    #[test]
    fn lowercase_brackets_are_not_placeholders() {
        assert!(QueryTemplate::new("[fan](subsystem) [x] [_A]").placeholders().is_empty());
    }

    proptest! {
        #[test]
        fn hostile_slot_values_stay_quoted(value in "\\PC{0,24}") {
            let t = QueryTemplate::new(VALUE_TEMPLATE);
            let text = t.instantiate(&slots(&[
                ("CHARACTERISTIC", Term::text(&value)),
                ("SUBSYSTEM", Term::text("} . ?x ?y ?z")),
                ("ENGINE_NAME", Term::text("\"; DROP")),
            ])).unwrap();
            let q = parse_query(&text).unwrap();
            prop_assert_eq!(q.patterns.len(), 7);
            prop_assert_eq!(&q.patterns[0].object, &TermOrVar::Term(Term::text(&value)));
        }
    }
}
