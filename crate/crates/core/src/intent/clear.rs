use std::collections::BTreeMap;

use serde::Serialize;

use super::classify::ParsedCommand;
use super::numbers::clear_number;
use super::registry::{SlotRegistry, SlotType};
use super::IntentError;
use crate::kg::vocab::{label, rdf_type};
use crate::kg::{closest_label, edit_distance, format_decimal, Graph, Pattern, Term};

/// Nearest candidate by case-insensitive edit distance; ties go to the
/// lexicographically smallest. Returns the member and its distance.
pub fn nearest_member<'a>(raw: &str, candidates: impl IntoIterator<Item = &'a str>) -> (&'a str, usize) {
    candidates
        .into_iter()
        .map(|m| (m, edit_distance(raw, m)))
        .min_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(b.0)))
        .unwrap_or(("", usize::MAX))
}

/// Snaps `raw` to the closest allowed value. `allowed` must be non-empty.
pub fn clear_enum<'a>(raw: &str, allowed: &[&'a str]) -> &'a str {
    nearest_member(raw, allowed.iter().copied()).0
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClearedCommand {
    pub intent: String,
    #[serde(serialize_with = "serialize_terms")]
    pub slots: BTreeMap<String, Term>,
}

fn serialize_terms<S: serde::Serializer>(slots: &BTreeMap<String, Term>, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(slots.len()))?;
    for (k, v) in slots {
        map.serialize_entry(k, &v.serialize())?;
    }
    map.end()
}

impl ClearedCommand {
    pub fn slot(&self, name: &str) -> Option<&Term> {
        self.slots.get(name)
    }
}

/// Text a number would carry as a label: `4.0` becomes `"4"`.
pub fn trimmed_number(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format_decimal(v)
    }
}

fn clear_one(name: &str, raw: &str, ty: &SlotType, graph: &Graph) -> Result<Term, IntentError> {
    let failed = |reason: String| IntentError::SlotClearingFailed { slot: name.to_string(), reason };
    match ty {
        SlotType::Number => {
            let v = clear_number(raw).map_err(|e| failed(e.to_string()))?;
            Term::decimal(v).map_err(|e| failed(e.to_string()))
        }
        SlotType::Enum(members) => {
            let chosen = nearest_member(raw, members.iter().map(|m| m.name.as_str())).0;
            let member = members.iter().find(|m| m.name == chosen).ok_or_else(|| failed("empty enum".into()))?;
            Ok(member.iri.clone().map(Term::Iri).unwrap_or_else(|| Term::text(&member.name)))
        }
        SlotType::KgLabel { class, numeric } => {
            if *numeric {
                if let Ok(v) = clear_number(raw) {
                    let wanted = Term::text(trimmed_number(v));
                    let instances = graph
                        .match_pattern(&Pattern::new(None, Some(rdf_type()), Some(Term::Iri(class.clone()))))
                        .map_err(|e| failed(e.to_string()))?;
                    for inst in instances {
                        let hit = Pattern::new(Some(inst.subject.clone()), Some(label()), Some(wanted.clone()));
                        if !graph.match_pattern(&hit).map_err(|e| failed(e.to_string()))?.is_empty() {
                            return Ok(Term::Iri(inst.subject));
                        }
                    }
                }
            }
            closest_label(graph, class, raw).map(|m| Term::Iri(m.resource)).map_err(|e| failed(e.to_string()))
        }
    }
}

/// Replaces each raw capture with its canonical value.
pub fn clear_slots(cmd: &ParsedCommand, registry: &SlotRegistry, graph: &Graph) -> Result<ClearedCommand, IntentError> {
    let mut slots = BTreeMap::new();
    for (name, raw) in &cmd.raw_slots {
        let ty = registry.get(name).ok_or_else(|| IntentError::UnknownSlot(name.clone()))?;
        slots.insert(name.clone(), clear_one(name, raw, ty, graph)?);
    }
    Ok(ClearedCommand { intent: cmd.intent.clone(), slots })
}
