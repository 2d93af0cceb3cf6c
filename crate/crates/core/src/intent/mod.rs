//! Deterministic intent matching over a Rasa-style markdown training file.

mod classify;
mod clear;
pub mod numbers;
mod registry;
mod training;

use thiserror::Error;

pub use classify::{classify, ParsedCommand, Score, MAX_SLOT_TOKENS, THRESHOLD};
pub use clear::{clear_enum, clear_slots, nearest_member, trimmed_number, ClearedCommand};
pub use numbers::{clear_number, number_to_words, ordinal_words, NotANumber};
pub use registry::{EnumMember, SlotRegistry, SlotType};
pub use training::{parse_training_file, tokenize, IntentSpec, TemplateToken, UtteranceTemplate};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IntentError {
    #[error("training file line {line}: {reason}")]
    Format { line: usize, reason: String },
    #[error("slot {0:?} is not registered")]
    UnknownSlot(String),
    #[error("could not clear slot {slot:?}: {reason}")]
    SlotClearingFailed { slot: String, reason: String },
}

/// Loaded intents plus the slot registry they are checked against.
#[derive(Clone, Debug)]
pub struct IntentModel {
    specs: Vec<IntentSpec>,
    registry: SlotRegistry,
}

impl IntentModel {
    pub fn new(specs: Vec<IntentSpec>, registry: SlotRegistry) -> Result<Self, IntentError> {
        for spec in &specs {
            for t in &spec.templates {
                if let Some(unknown) = t.slot_names().find(|s| registry.get(s).is_none()) {
                    return Err(IntentError::Format {
                        line: t.line,
                        reason: format!("slot {unknown:?} is not registered"),
                    });
                }
            }
        }
        Ok(IntentModel { specs, registry })
    }

    pub fn from_training_text(text: &str) -> Result<Self, IntentError> {
        IntentModel::new(parse_training_file(text)?, SlotRegistry::default())
    }

    pub fn specs(&self) -> &[IntentSpec] {
        &self.specs
    }

    pub fn registry(&self) -> &SlotRegistry {
        &self.registry
    }

    pub fn classify(&self, utterance: &str) -> Option<ParsedCommand> {
        classify(utterance, &self.specs, &self.registry)
    }
}
