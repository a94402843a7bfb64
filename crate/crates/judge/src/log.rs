//! Append-only judgment log.
//!
//! One JSON object per line, in the order the service accepted them. The
//! log is the only persistent state: current grades and exported qrels are
//! both replays of it, and a later line always supersedes an earlier one
//! for the same (assessor, topic, document).

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Seek, SeekFrom, Write};
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use trelkit::model::{Grade, Qrels};

use crate::error::{JudgeError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JudgmentEvent {
    pub assessor_id: String,
    pub topic_id: String,
    pub doc_id: String,
    pub grade: Grade,
    pub timestamp: DateTime<Utc>,
}

pub fn read_log(path: &Path) -> Result<Vec<JudgmentEvent>> {
    match File::open(path) {
        Ok(f) => parse_log(BufReader::new(f)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Vec::new()),
        Err(e) => Err(e.into()),
    }
}

/// A final line without its newline is a torn append and is ignored; any
/// other malformed line is an error.
pub fn parse_log(reader: impl BufRead) -> Result<Vec<JudgmentEvent>> {
    let mut events = Vec::new();
    let mut lines = reader.split(b'\n').enumerate().peekable();
    while let Some((i, line)) = lines.next() {
        let line = line?;
        let last = lines.peek().is_none();
        if line.iter().all(u8::is_ascii_whitespace) {
            continue;
        }
        match serde_json::from_slice(&line) {
            Ok(e) => events.push(e),
            Err(_) if last => {}
            Err(e) => return Err(JudgeError::Log { line: i + 1, message: e.to_string() }),
        }
    }
    Ok(events)
}

/// Current grade per (assessor, topic, document).
pub fn replay<'a>(events: impl IntoIterator<Item = &'a JudgmentEvent>) -> BTreeMap<(String, String, String), Grade> {
    let mut state = BTreeMap::new();
    for e in events {
        state.insert((e.assessor_id.clone(), e.topic_id.clone(), e.doc_id.clone()), e.grade);
    }
    state
}

/// One qrels per assessor, each holding that assessor's latest grades.
pub fn export_qrels(events: &[JudgmentEvent]) -> BTreeMap<String, Qrels> {
    let mut out: BTreeMap<String, Qrels> = BTreeMap::new();
    for ((assessor, topic, doc), grade) in replay(events) {
        out.entry(assessor).or_default().set(&topic, &doc, grade);
    }
    out
}

/// Writer side of the log. Each append is flushed and synced before it
/// returns.
#[derive(Debug)]
pub struct LogWriter {
    file: File,
}

impl LogWriter {
    /// Opens for appending, first cutting off a torn final line so the
    /// next record starts on a fresh line.
    pub fn open(path: &Path) -> Result<Self> {
        let mut file = OpenOptions::new().read(true).append(true).create(true).open(path)?;
        let len = file.metadata()?.len();
        if len > 0 {
            let content = std::fs::read(path)?;
            if content.last() != Some(&b'\n') {
                let keep = content.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
                file.set_len(keep as u64)?;
                file.seek(SeekFrom::End(0))?;
            }
        }
        Ok(Self { file })
    }

    pub fn append(&mut self, event: &JudgmentEvent) -> Result<()> {
        let mut line = serde_json::to_vec(event).expect("event serializes");
        line.push(b'\n');
        self.file.write_all(&line)?;
        self.file.sync_data()?;
        Ok(())
    }
}
