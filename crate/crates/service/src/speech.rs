/// Seam for speech-to-text before `ask` and text-to-speech after it.
///
/// Both calls run outside the state lock.
pub trait SpeechAdapter: Send + Sync {
    fn transcribe(&self, input: &str) -> String;
    fn synthesize(&self, message: &str) -> String;
}

/// Passes text through unchanged.
#[derive(Clone, Copy, Debug, Default)]
pub struct Identity;

impl SpeechAdapter for Identity {
    fn transcribe(&self, input: &str) -> String {
        input.to_string()
    }

    fn synthesize(&self, message: &str) -> String {
        message.to_string()
    }
}
