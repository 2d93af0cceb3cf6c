//! Fixed prefix table and the aeroengine vocabulary.

use super::term::{Iri, Term, Triple};
use super::Graph;

pub const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS_NS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const AERO_NS: &str = "http://jarvis.example/aero#";

/// The three namespaces the store understands. Immutable.
#[derive(Debug, Clone, Copy, Default)]
pub struct PrefixTable;

impl PrefixTable {
    const ENTRIES: [(&'static str, &'static str); 3] = [("rdf", RDF_NS), ("rdfs", RDFS_NS), ("aero", AERO_NS)];

    pub fn namespace(&self, prefix: &str) -> Option<&'static str> {
        Self::ENTRIES.iter().find(|(p, _)| *p == prefix).map(|(_, ns)| *ns)
    }

    /// Resolves `prefix:local` to an absolute IRI.
    pub fn expand(&self, prefixed: &str) -> Option<Iri> {
        let (prefix, local) = prefixed.split_once(':')?;
        let ns = self.namespace(prefix)?;
        Iri::new(format!("{ns}{local}")).ok()
    }

    /// Shortest prefixed name for `iri`, if its local part is a plain name.
    pub fn compact(&self, iri: &Iri) -> Option<String> {
        Self::ENTRIES.iter().find_map(|(p, ns)| {
            let local = iri.as_str().strip_prefix(ns)?;
            let plain = !local.is_empty() && local.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
            plain.then(|| format!("{p}:{local}"))
        })
    }
}

pub fn rdf(local: &str) -> Iri {
    Iri::new(format!("{RDF_NS}{local}")).expect("static rdf name")
}

pub fn rdfs(local: &str) -> Iri {
    Iri::new(format!("{RDFS_NS}{local}")).expect("static rdfs name")
}

/// An IRI in the `aero:` namespace. Panics on names containing whitespace.
pub fn aero(local: &str) -> Iri {
    Iri::new(format!("{AERO_NS}{local}")).expect("aero local name")
}

pub fn rdf_type() -> Iri {
    rdf("type")
}

pub fn label() -> Iri {
    rdfs("label")
}

pub fn is_subclass_of() -> Iri {
    aero("isSubclassOf")
}

pub fn is_part_of() -> Iri {
    aero("isPartOf")
}

pub fn is_depicted_on() -> Iri {
    aero("isDepictedOn")
}

pub fn vr_id() -> Iri {
    aero("VR_ID")
}

pub fn fleet() -> Iri {
    aero("Fleet")
}

pub fn latitude() -> Iri {
    aero("Latitude")
}

pub fn longitude() -> Iri {
    aero("Longitude")
}

pub fn flight_hours() -> Iri {
    aero("FlightHours")
}

pub const CLASSES: [&str; 11] =
    ["Engine", "Subsystem", "Compressor", "Fan", "LPC", "IPC", "HPC", "Plot", "Function", "Characteristic", "Fleet"];

/// Characteristic predicates carried by every demo subsystem.
pub const CHARACTERISTICS: [&str; 4] = ["PressureRatio", "Speed", "Efficiency", "MassFlow"];

/// Subsystem kinds and the class label the query templates match on.
pub const SUBSYSTEM_CLASSES: [(&str, &str); 4] = [("Fan", "fan"), ("LPC", "LPC"), ("IPC", "IPC"), ("HPC", "HPC")];

/// The terminology part of the graph.
pub fn tbox_triples() -> Vec<Triple> {
    let ty = rdf_type();
    let sub = is_subclass_of();
    let mut out = Vec::new();
    for class in CLASSES {
        out.push(Triple::new(aero(class), ty.clone(), rdfs("Class")));
    }
    for c in ["LPC", "IPC", "HPC"] {
        out.push(Triple::new(aero(c), sub.clone(), aero("Compressor")));
    }
    for c in ["Compressor", "Fan"] {
        out.push(Triple::new(aero(c), sub.clone(), aero("Subsystem")));
    }
    out.push(Triple::new(aero("Compressor"), is_depicted_on(), aero("Plot")));
    out.push(Triple::new(aero("Subsystem"), is_part_of(), aero("Engine")));
    for (class, text) in SUBSYSTEM_CLASSES {
        out.push(Triple::new(aero(class), label(), Term::text(text)));
    }
    for ch in CHARACTERISTICS {
        out.push(Triple::new(aero(ch), ty.clone(), aero("Characteristic")));
        out.push(Triple::new(aero(ch), label(), Term::text(ch)));
    }
    for p in ["VR_ID", "FlightHours", "Fleet", "Latitude", "Longitude"] {
        out.push(Triple::new(aero(p), ty.clone(), rdf("Property")));
    }
    out
}

/// Inserts the TBox. Idempotent.
pub fn seed_tbox(graph: &mut Graph) {
    for t in tbox_triples() {
        graph.insert(t);
    }
}
