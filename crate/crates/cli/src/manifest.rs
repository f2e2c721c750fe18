use std::collections::BTreeMap;
use std::path::Path;

use proxlaw::prereg::{format_utc, sha256_hex, Clock, FixedClock, SystemClock};
use serde::Serialize;
use serde_json::Value;

use crate::Failure;

/// Reproducibility envelope written next to a command's output.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub arguments: BTreeMap<String, Value>,
    /// Path as given on the command line to SHA-256 of the bytes read.
    pub input_digests: BTreeMap<String, String>,
    pub tool_version: String,
    pub timestamp_utc: String,
}

/// `SOURCE_DATE_EPOCH` pins every timestamp the tool writes.
pub fn clock() -> Result<Box<dyn Clock>, Failure> {
    match std::env::var("SOURCE_DATE_EPOCH") {
        Ok(s) => {
            let secs: i64 = s
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("SOURCE_DATE_EPOCH is not an integer: {s:?}")))?;
            Ok(Box::new(FixedClock::at_unix(secs)))
        }
        Err(_) => Ok(Box::new(SystemClock)),
    }
}

impl RunManifest {
    pub fn new(command: &str, arguments: Value) -> Self {
        let arguments = match arguments {
            Value::Object(m) => m.into_iter().collect(),
            other => BTreeMap::from([("value".to_string(), other)]),
        };
        Self {
            command: command.to_string(),
            arguments,
            input_digests: BTreeMap::new(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp_utc: String::new(),
        }
    }

    pub fn read_bytes(&mut self, path: &Path) -> Result<Vec<u8>, Failure> {
        let bytes = std::fs::read(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        self.input_digests
            .insert(path.display().to_string(), sha256_hex(&bytes));
        Ok(bytes)
    }

    pub fn read(&mut self, path: &Path) -> Result<String, Failure> {
        let bytes = self.read_bytes(path)?;
        String::from_utf8(bytes).map_err(|_| Failure::Io(format!("{}: not valid UTF-8", path.display())))
    }

    pub fn write(mut self, path: &Path, clock: &dyn Clock) -> Result<(), Failure> {
        self.timestamp_utc = format_utc(clock.now());
        let text = serde_json::to_string_pretty(&self).expect("manifest serializes") + "\n";
        std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
    }
}
