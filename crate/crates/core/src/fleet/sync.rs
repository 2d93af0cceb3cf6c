//! Mirrors fleet records into the knowledge graph.

use super::model::{EngineRecord, SubsystemKind, SubsystemRecord};
use super::updates::UpdateMethod;
use crate::intent::{number_to_words, ordinal_words};
use crate::kg::vocab::{
    aero, fleet, flight_hours, is_depicted_on, is_part_of, label, latitude, longitude, rdf_type, vr_id,
};
use crate::kg::{Graph, Iri, Pattern, Term, Triple};

pub fn engine_iri(vr_id: i64) -> Iri {
    aero(&format!("Engine_{vr_id}"))
}

pub fn subsystem_iri(vr_id: i64, kind: SubsystemKind) -> Iri {
    aero(&format!("{}_of_Engine_{vr_id}", kind.as_str()))
}

pub fn plot_iri(vr_id: i64, kind: SubsystemKind) -> Iri {
    aero(&format!("Plot_{}_{vr_id}", kind.as_str()))
}

fn local_name(text: &str) -> String {
    text.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect()
}

pub fn fleet_iri(name: &str) -> Iri {
    aero(&format!("Fleet_{}", local_name(name)))
}

pub fn function_iri(target: &str) -> Iri {
    aero(&format!("Function_{target}"))
}

/// Labels an engine answers to: its own label and, when that is a small
/// whole number, the spoken cardinal and ordinal forms.
pub fn engine_labels(label: &str) -> Vec<String> {
    let mut out = vec![label.to_string()];
    if let Ok(n) = label.parse::<u32>() {
        if n <= 9999 && n.to_string() == label {
            out.push(number_to_words(n));
            out.push(ordinal_words(n));
        }
    }
    out
}

fn decimal(v: f64) -> Term {
    Term::decimal(v).expect("fleet values are validated finite")
}

/// Declares `name` as a characteristic. Idempotent.
pub fn characteristic_triples(name: &str) -> Vec<Triple> {
    vec![
        Triple::new(aero(name), rdf_type(), aero("Characteristic")),
        Triple::new(aero(name), label(), Term::text(name)),
    ]
}

pub fn subsystem_triples(vr_id: i64, kind: SubsystemKind, sub: &SubsystemRecord) -> Vec<Triple> {
    let inst = subsystem_iri(vr_id, kind);
    let mut out = vec![
        Triple::new(inst.clone(), rdf_type(), aero(kind.class_name())),
        Triple::new(inst.clone(), label(), Term::text(format!("{kind}_of_Engine_{vr_id}"))),
        Triple::new(inst.clone(), is_part_of(), engine_iri(vr_id)),
        Triple::new(inst.clone(), is_depicted_on(), plot_iri(vr_id, kind)),
        Triple::new(plot_iri(vr_id, kind), rdf_type(), aero("Plot")),
    ];
    for (name, v) in &sub.characteristics {
        out.extend(characteristic_triples(name));
        out.push(Triple::new(inst.clone(), aero(name), decimal(*v)));
    }
    if let Some(h) = sub.flight_hours() {
        out.push(Triple::new(inst, flight_hours(), decimal(h)));
    }
    out
}

pub fn engine_triples(e: &EngineRecord) -> Vec<Triple> {
    let iri = engine_iri(e.vr_id);
    let mut out = vec![
        Triple::new(iri.clone(), rdf_type(), aero("Engine")),
        Triple::new(iri.clone(), vr_id(), Term::integer(e.vr_id)),
        Triple::new(iri.clone(), fleet(), Term::text(&e.fleet)),
        Triple::new(iri.clone(), latitude(), decimal(e.latitude)),
        Triple::new(iri.clone(), longitude(), decimal(e.longitude)),
        Triple::new(fleet_iri(&e.fleet), rdf_type(), aero("Fleet")),
        Triple::new(fleet_iri(&e.fleet), label(), Term::text(&e.fleet)),
    ];
    for l in engine_labels(&e.label) {
        out.push(Triple::new(iri.clone(), label(), Term::text(l)));
    }
    for (kind, sub) in &e.subsystems {
        out.extend(subsystem_triples(e.vr_id, *kind, sub));
    }
    out
}

pub fn insert_engine(graph: &mut Graph, e: &EngineRecord) {
    for t in engine_triples(e) {
        graph.insert(t);
    }
}

/// Replaces the data-property triples of `names` (and the flight hours) on
/// one subsystem with the record's current values.
pub fn replace_values<'a>(
    graph: &mut Graph,
    vr_id: i64,
    kind: SubsystemKind,
    sub: &SubsystemRecord,
    names: impl IntoIterator<Item = &'a String>,
) {
    let inst = subsystem_iri(vr_id, kind);
    for name in names {
        graph.remove_matching(&Pattern::new(Some(inst.clone()), Some(aero(name)), None));
        if let Some(v) = sub.value(name) {
            for t in characteristic_triples(name) {
                graph.insert(t);
            }
            graph.insert(Triple::new(inst.clone(), aero(name), decimal(v)));
        }
    }
    graph.remove_matching(&Pattern::new(Some(inst.clone()), Some(flight_hours()), None));
    if let Some(h) = sub.flight_hours() {
        graph.insert(Triple::new(inst, flight_hours(), decimal(h)));
    }
}

/// The `Function` node for a method, replacing any earlier one.
pub fn replace_function(graph: &mut Graph, method: &UpdateMethod) {
    let node = function_iri(&method.target);
    graph.remove_matching(&Pattern::new(Some(node.clone()), None, None));
    for t in characteristic_triples(&method.target) {
        graph.insert(t);
    }
    graph.insert(Triple::new(node.clone(), rdf_type(), aero("Function")));
    graph.insert(Triple::new(node.clone(), label(), Term::text(format!("update {}", method.target))));
    graph.insert(Triple::new(node.clone(), aero("computes"), aero(&method.target)));
    graph.insert(Triple::new(node.clone(), aero("expression"), Term::text(&method.func_expr)));
    for arg in &method.func_args {
        graph.insert(Triple::new(node.clone(), aero("hasArgument"), aero(arg)));
    }
}
