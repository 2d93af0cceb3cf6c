use serde::{Deserialize, Serialize};

/// What the front end receives for one command.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemResponse {
    #[serde(rename = "engineID")]
    pub engine_id: Option<i64>,
    pub subsystem: Option<String>,
    pub message: String,
}

impl SystemResponse {
    pub fn answer(engine_id: i64, subsystem: Option<String>, message: String) -> Self {
        SystemResponse { engine_id: Some(engine_id), subsystem, message }
    }

    pub fn apology(kind: Apology) -> Self {
        SystemResponse { engine_id: None, subsystem: None, message: apology(kind).to_string() }
    }

    pub fn is_apology(&self) -> bool {
        self.engine_id.is_none() && self.subsystem.is_none()
    }
}

/// Failure classes with a fixed spoken apology each.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Apology {
    NoMatch,
    SlotClearing,
    UnknownEngine,
    UnknownSubsystem,
    UnknownCharacteristic,
    UnknownFleet,
    NoData,
    NoBoundary,
    NoSamples,
    Unsupported,
    Internal,
}

impl Apology {
    pub const ALL: [Apology; 11] = [
        Apology::NoMatch,
        Apology::SlotClearing,
        Apology::UnknownEngine,
        Apology::UnknownSubsystem,
        Apology::UnknownCharacteristic,
        Apology::UnknownFleet,
        Apology::NoData,
        Apology::NoBoundary,
        Apology::NoSamples,
        Apology::Unsupported,
        Apology::Internal,
    ];
}

pub fn apology(kind: Apology) -> &'static str {
    match kind {
        Apology::NoMatch => "Sorry, I did not understand the command.",
        Apology::SlotClearing => "Sorry, I could not match the values in the command to the knowledge graph.",
        Apology::UnknownEngine => "Sorry, I do not know that engine.",
        Apology::UnknownSubsystem => "Sorry, that engine does not have that subsystem.",
        Apology::UnknownCharacteristic => "Sorry, that characteristic is not recorded for that subsystem.",
        Apology::UnknownFleet => "Sorry, I do not know that fleet.",
        Apology::NoData => "Sorry, there is no data to answer that question.",
        Apology::NoBoundary => "Sorry, the compressor map lacks that operating boundary.",
        Apology::NoSamples => "Sorry, there are no samples after that many flight hours.",
        Apology::Unsupported => "Sorry, I cannot answer that kind of question.",
        Apology::Internal => "Sorry, something went wrong while answering.",
    }
}

/// Up to four fractional digits, trailing zeros trimmed, at least one kept.
pub fn format_value(v: f64) -> String {
    let mut s = format!("{:.4}", v);
    while s.ends_with('0') && !s.ends_with(".0") {
        s.pop();
    }
    if s == "-0.0" {
        s = "0.0".into();
    }
    s
}
