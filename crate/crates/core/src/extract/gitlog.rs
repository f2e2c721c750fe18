use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::ExtractError;

/// The log invocation whose output [`parse_git_log`] reads.
pub const GIT_LOG_COMMAND: &str = "git log --name-only --pretty=format:%H%x09%ct";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitRecord {
    pub commit_id: String,
    /// Unix seconds.
    pub timestamp: i64,
    /// Repository-relative paths, first-seen order, no duplicates.
    pub files: Vec<String>,
}

fn parse_header(line: &str) -> Option<Result<(String, i64), String>> {
    let (id, ts) = line.split_once('\t')?;
    if id.len() < 7 || id.len() > 64 || !id.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Some(Err(format!("bad commit id {id:?}")));
    }
    match ts.trim().parse::<i64>() {
        Ok(t) => Some(Ok((id.to_ascii_lowercase(), t))),
        Err(_) => Some(Err(format!("bad commit timestamp {ts:?}"))),
    }
}

/// Parses `git log --name-only --pretty=format:%H%x09%ct` output.
///
/// A header is `<hex id>\t<unix seconds>`; the following non-blank lines are
/// that commit's files. Commits without files are dropped.
pub fn parse_git_log(text: &str) -> Result<Vec<CommitRecord>, ExtractError> {
    let mut out: Vec<CommitRecord> = Vec::new();
    let mut current: Option<CommitRecord> = None;
    let mut seen_ids = HashSet::new();
    let mut seen_files: HashSet<String> = HashSet::new();

    let flush = |c: Option<CommitRecord>, out: &mut Vec<CommitRecord>| {
        if let Some(c) = c {
            if !c.files.is_empty() {
                out.push(c);
            }
        }
    };

    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        match parse_header(line) {
            Some(Ok((id, timestamp))) => {
                if !seen_ids.insert(id.clone()) {
                    return Err(ExtractError::MalformedLog {
                        line: lineno,
                        message: format!("duplicate commit id {id}"),
                    });
                }
                flush(current.take(), &mut out);
                seen_files.clear();
                current = Some(CommitRecord {
                    commit_id: id,
                    timestamp,
                    files: Vec::new(),
                });
            }
            Some(Err(message)) => {
                return Err(ExtractError::MalformedLog {
                    line: lineno,
                    message,
                })
            }
            None => match current.as_mut() {
                Some(c) => {
                    if seen_files.insert(line.to_string()) {
                        c.files.push(line.to_string());
                    }
                }
                None => {
                    return Err(ExtractError::MalformedLog {
                        line: lineno,
                        message: "file path before any commit header".into(),
                    })
                }
            },
        }
    }
    flush(current, &mut out);
    Ok(out)
}
