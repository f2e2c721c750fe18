use std::fs::{File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{canonical_json, digest, format_utc, Clock, HypothesisDoc, PreregError};

/// One ledger line: `{"digest": hex64, "doc": {...}, "index": int, "timestamp_utc": str}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreregRecord {
    pub index: u64,
    pub digest: String,
    pub timestamp_utc: String,
    pub doc: HypothesisDoc,
}

impl PreregRecord {
    fn to_line(&self) -> String {
        let doc = serde_json::to_value(&self.doc).expect("hypothesis docs serialize");
        canonical_json(&json!({
            "index": self.index,
            "digest": self.digest,
            "timestamp_utc": self.timestamp_utc,
            "doc": doc,
        }))
    }
}

fn io_err(e: std::io::Error) -> PreregError {
    PreregError::LedgerIo(e.to_string())
}

fn parse_lines(text: &str) -> Result<Vec<PreregRecord>, PreregError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| PreregError::LedgerFormat {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

/// All records in file order. A missing file is an empty ledger.
pub fn read_ledger(path: &Path) -> Result<Vec<PreregRecord>, PreregError> {
    match std::fs::read_to_string(path) {
        Ok(text) => parse_lines(&text),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Vec::new()),
        Err(e) => Err(io_err(e)),
    }
}

/// Human-readable problems: index gaps and digests that no longer match
/// their stored document.
pub fn audit_ledger(records: &[PreregRecord]) -> Vec<String> {
    let mut problems = Vec::new();
    for (pos, rec) in records.iter().enumerate() {
        if rec.index != pos as u64 {
            problems.push(format!("record at position {pos} has index {}", rec.index));
        }
        if digest(&rec.doc) != rec.digest {
            problems.push(format!(
                "record {} ({}) digest does not match its document",
                rec.index, rec.doc.experiment_id
            ));
        }
    }
    problems
}

/// Appends `doc` to the ledger at `ledger_path` under an exclusive file lock.
pub fn register(doc: &HypothesisDoc, ledger_path: &Path, clock: &dyn Clock) -> Result<PreregRecord, PreregError> {
    doc.validate()?;
    let mut file: File = OpenOptions::new()
        .read(true)
        .append(true)
        .create(true)
        .open(ledger_path)
        .map_err(io_err)?;
    file.lock().map_err(io_err)?;

    let mut text = String::new();
    file.seek(SeekFrom::Start(0)).map_err(io_err)?;
    file.read_to_string(&mut text).map_err(io_err)?;
    let existing = parse_lines(&text)?;
    if existing.iter().any(|r| r.doc.experiment_id == doc.experiment_id) {
        return Err(PreregError::DuplicateExperiment(doc.experiment_id.clone()));
    }

    let record = PreregRecord {
        index: existing.len() as u64,
        digest: digest(doc),
        timestamp_utc: format_utc(clock.now()),
        doc: doc.clone(),
    };
    let mut line = record.to_line();
    line.push('\n');
    if !text.is_empty() && !text.ends_with('\n') {
        line.insert(0, '\n');
    }
    file.write_all(line.as_bytes()).map_err(io_err)?;
    file.sync_data().map_err(io_err)?;
    file.unlock().map_err(io_err)?;
    Ok(record)
}
