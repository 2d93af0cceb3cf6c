use std::fs::{File, OpenOptions};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use parking_lot::Mutex;
use serde::{Deserialize, Serialize};

/// One line of the request log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub timestamp: String,
    pub method: String,
    pub latency_us: u64,
}

/// Append-only JSON-lines log; a no-op when no path is configured.
#[derive(Debug, Default)]
pub struct RequestLog {
    out: Option<Mutex<BufWriter<File>>>,
}

impl RequestLog {
    pub fn disabled() -> Self {
        RequestLog { out: None }
    }

    pub fn open(path: &Path) -> io::Result<Self> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(RequestLog { out: Some(Mutex::new(BufWriter::new(file))) })
    }

    pub fn record(&self, method: &str, latency: std::time::Duration) {
        let Some(out) = &self.out else { return };
        let entry = LogEntry {
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
            method: method.to_string(),
            latency_us: latency.as_micros().try_into().unwrap_or(u64::MAX),
        };
        let mut w = out.lock();
        if let Ok(line) = serde_json::to_string(&entry) {
            let _ = writeln!(w, "{line}");
        }
    }

    pub fn flush(&self) -> io::Result<()> {
        match &self.out {
            Some(out) => out.lock().flush(),
            None => Ok(()),
        }
    }
}

impl Drop for RequestLog {
    fn drop(&mut self) {
        let _ = self.flush();
    }
}
