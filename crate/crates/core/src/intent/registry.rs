use std::collections::BTreeMap;

use crate::kg::vocab::aero;
use crate::kg::Iri;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumMember {
    pub name: String,
    /// Graph resource the member stands for, when it has one.
    pub iri: Option<Iri>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SlotType {
    Number,
    Enum(Vec<EnumMember>),
    /// Resolved against `rdfs:label`s of instances of `class`. With
    /// `numeric`, spoken numbers first try the label equal to the parsed value.
    KgLabel {
        class: Iri,
        numeric: bool,
    },
}

impl SlotType {
    pub fn enum_names(&self) -> Vec<&str> {
        match self {
            SlotType::Enum(members) => members.iter().map(|m| m.name.as_str()).collect(),
            _ => Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotRegistry {
    slots: BTreeMap<String, SlotType>,
}

fn members(pairs: &[(&str, Option<&str>)]) -> SlotType {
    SlotType::Enum(pairs.iter().map(|(n, iri)| EnumMember { name: n.to_string(), iri: iri.map(aero) }).collect())
}

impl Default for SlotRegistry {
    fn default() -> Self {
        let mut slots = BTreeMap::new();
        slots.insert("engine_name".into(), SlotType::KgLabel { class: aero("Engine"), numeric: true });
        slots.insert(
            "subsystem".into(),
            members(&[("fan", Some("Fan")), ("LPC", Some("LPC")), ("IPC", Some("IPC")), ("HPC", Some("HPC"))]),
        );
        slots.insert(
            "characteristic".into(),
            members(&[
                ("efficiency", Some("Efficiency")),
                ("speed", Some("Speed")),
                ("pressure ratio", Some("PressureRatio")),
                ("mass flow", Some("MassFlow")),
            ]),
        );
        slots.insert("num_value".into(), SlotType::Number);
        slots.insert("subsystem_state".into(), members(&[("choke", None), ("stall", None)]));
        slots.insert("best_direction".into(), members(&[("highest", None), ("lowest", None)]));
        slots.insert("hours".into(), SlotType::Number);
        slots.insert("fleet_name".into(), SlotType::KgLabel { class: aero("Fleet"), numeric: false });
        SlotRegistry { slots }
    }
}

impl SlotRegistry {
    pub fn get(&self, slot: &str) -> Option<&SlotType> {
        self.slots.get(slot)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &SlotType)> {
        self.slots.iter()
    }

    pub fn insert(&mut self, slot: impl Into<String>, ty: SlotType) {
        self.slots.insert(slot.into(), ty);
    }
}
