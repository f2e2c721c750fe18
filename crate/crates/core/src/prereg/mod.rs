//! Pre-registration of hypothesis documents.
//!
//! A hypothesis document is reduced to canonical bytes (sorted keys, no
//! whitespace, shortest round-trip numbers), hashed with SHA-256, and
//! appended to a line-delimited ledger together with a UTC timestamp. The
//! timestamp is ledger metadata and never part of the hashed bytes.

mod canonical;
mod ledger;

use std::collections::BTreeMap;

use chrono::{DateTime, TimeZone, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::experiment::LayerPair;

pub use canonical::canonical_json;
pub use ledger::{audit_ledger, read_ledger, register, PreregRecord};

/// Length of digests written before full-length hashing was adopted.
pub const LEGACY_DIGEST_LEN: usize = 16;

#[derive(Debug, Error, PartialEq)]
pub enum PreregError {
    #[error("malformed digest ({len} chars): expected 64 hex characters{hint}")]
    MalformedDigest { len: usize, hint: &'static str },
    #[error("experiment {0:?} is already registered")]
    DuplicateExperiment(String),
    #[error("ledger I/O error: {0}")]
    LedgerIo(String),
    #[error("ledger line {line}: {message}")]
    LedgerFormat { line: usize, message: String },
    #[error("invalid hypothesis document: {0}")]
    InvalidDoc(String),
}

const LEGACY_HINT: &str =
    "; 16-character digests are the truncated legacy form, verify them with the legacy flag";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Greater,
    Less,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypothesisDoc {
    pub experiment_id: String,
    pub statement_texts: Vec<String>,
    pub similar_pair: LayerPair,
    #[serde(default)]
    pub dissimilar_pair: Option<LayerPair>,
    pub direction: Direction,
    #[serde(default)]
    pub thresholds: BTreeMap<String, f64>,
    #[serde(default)]
    pub author: String,
    #[serde(default)]
    pub notes: String,
}

impl HypothesisDoc {
    pub fn validate(&self) -> Result<(), PreregError> {
        if self.experiment_id.is_empty() {
            return Err(PreregError::InvalidDoc("experiment_id is empty".into()));
        }
        if self.statement_texts.is_empty() {
            return Err(PreregError::InvalidDoc("at least one statement is required".into()));
        }
        if let Some((k, v)) = self.thresholds.iter().find(|(_, v)| !v.is_finite()) {
            return Err(PreregError::InvalidDoc(format!("threshold {k:?} is not finite ({v})")));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, PreregError> {
        let doc: Self = serde_json::from_str(text).map_err(|e| PreregError::InvalidDoc(e.to_string()))?;
        doc.validate()?;
        Ok(doc)
    }
}

/// Canonical UTF-8 bytes of `doc`; the input to [`digest`].
pub fn canonicalize(doc: &HypothesisDoc) -> Vec<u8> {
    let value = serde_json::to_value(doc).expect("hypothesis docs serialize");
    canonical_json(&value).into_bytes()
}

/// Lowercase hex SHA-256 of arbitrary bytes.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn digest(doc: &HypothesisDoc) -> String {
    sha256_hex(&canonicalize(doc))
}

fn normalize_digest(claimed: &str, expected_len: usize) -> Result<String, PreregError> {
    let lower = claimed.trim().to_ascii_lowercase();
    if lower.len() != expected_len || !lower.bytes().all(|b| b.is_ascii_hexdigit()) {
        let hint = if expected_len == 64 && lower.len() == LEGACY_DIGEST_LEN {
            LEGACY_HINT
        } else {
            ""
        };
        return Err(PreregError::MalformedDigest {
            len: claimed.trim().len(),
            hint,
        });
    }
    Ok(lower)
}

/// True iff `claimed` (64 hex chars, any case) is the digest of `doc`.
pub fn verify(doc: &HypothesisDoc, claimed: &str) -> Result<bool, PreregError> {
    let claimed = normalize_digest(claimed, 64)?;
    Ok(digest(doc) == claimed)
}

/// Checks a truncated 16-character legacy digest by prefix.
pub fn verify_legacy(doc: &HypothesisDoc, claimed: &str) -> Result<bool, PreregError> {
    let claimed = normalize_digest(claimed, LEGACY_DIGEST_LEN)?;
    Ok(digest(doc).starts_with(&claimed))
}

/// UTC time source, injectable for reproducible runs.
pub trait Clock {
    fn now(&self) -> DateTime<Utc>;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> DateTime<Utc> {
        Utc::now()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct FixedClock(pub DateTime<Utc>);

impl FixedClock {
    pub fn at_unix(secs: i64) -> Self {
        Self(Utc.timestamp_opt(secs, 0).single().expect("valid unix time"))
    }
}

impl Clock for FixedClock {
    fn now(&self) -> DateTime<Utc> {
        self.0
    }
}

/// ISO-8601 with second precision and a `Z` suffix.
pub fn format_utc(t: DateTime<Utc>) -> String {
    t.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}
