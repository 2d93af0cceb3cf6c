//! Knowledge-graph question answering over an aeroengine fleet.

pub mod assets;
pub mod fleet;
pub mod intent;
pub mod kg;
mod pipeline;
pub mod sparql;

pub use pipeline::{check_templates, AskTrace, FleetSnapshot, Highlight, Jarvis, SetupError, UpdateRequest};
