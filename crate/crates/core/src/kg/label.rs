use super::graph::{Graph, Pattern};
use super::term::{Iri, Term};
use super::vocab::{label, rdf_type};
use super::KgError;

/// Case-insensitive, character-level edit distance.
pub fn edit_distance(a: &str, b: &str) -> usize {
    strsim::levenshtein(&a.to_lowercase(), &b.to_lowercase())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelMatch {
    pub resource: Iri,
    pub label: String,
    pub distance: usize,
}

/// Nearest labelled instance of `class` to `raw`.
///
/// Ties go to the lexicographically smallest label, then the smallest IRI.
/// Requires a materialized graph so inferred instances count.
pub fn closest_label(graph: &Graph, class: &Iri, raw: &str) -> Result<LabelMatch, KgError> {
    let instances = graph.match_pattern(&Pattern::new(None, Some(rdf_type()), Some(Term::Iri(class.clone()))))?;
    let mut best: Option<LabelMatch> = None;
    for inst in instances {
        let labels = graph.match_pattern(&Pattern::new(Some(inst.subject.clone()), Some(label()), None))?;
        for l in labels {
            let Some(text) = l.object.as_text() else { continue };
            let candidate = LabelMatch {
                resource: inst.subject.clone(),
                label: text.to_string(),
                distance: edit_distance(raw, text),
            };
            let better = match &best {
                None => true,
                Some(b) => {
                    (candidate.distance, candidate.label.as_str(), candidate.resource.as_str())
                        < (b.distance, b.label.as_str(), b.resource.as_str())
                }
            };
            if better {
                best = Some(candidate);
            }
        }
    }
    best.ok_or_else(|| KgError::NoCandidates(class.as_str().to_string()))
}
