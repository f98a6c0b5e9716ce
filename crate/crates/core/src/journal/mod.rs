//! Append-only event journal.
//!
//! On disk a journal is UTF-8 text with one JSON value per line: a header
//! line followed by one line per [`EventRecord`]. The header embeds the
//! configuration and scenario so a journal can be replayed on its own.

mod record;
pub mod replay;

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::FaithConfig;
use crate::world::Scenario;

pub use record::{EventPayload, EventRecord, RejectionStage};
pub use replay::{replay, Divergence, ReplayError, ReplayReport};

pub const JOURNAL_SCHEMA: &str = "arena-journal/1";

#[derive(Debug, Error)]
pub enum JournalError {
    #[error("record ({tick}, {seq}) does not follow ({last_tick}, {last_seq})")]
    Ordering {
        tick: u64,
        seq: u32,
        last_tick: u64,
        last_seq: u32,
    },
    #[error("rng cursor went backwards: {cursor} after {last}")]
    RngCursor { cursor: u64, last: u64 },
    #[error("journal I/O: {0}")]
    Io(#[from] io::Error),
    #[error("journal header: {0}")]
    Header(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JournalHeader {
    pub schema: String,
    pub config_hash: String,
    pub seed: u64,
    pub backend: String,
    pub config: FaithConfig,
    pub scenario: Scenario,
}

impl JournalHeader {
    pub fn new(config: &FaithConfig, scenario: &Scenario, seed: u64, backend: &str) -> Self {
        JournalHeader {
            schema: JOURNAL_SCHEMA.to_string(),
            config_hash: config.content_hash(),
            seed,
            backend: backend.to_string(),
            config: config.clone(),
            scenario: scenario.clone(),
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("journal headers serialize")
    }
}

/// In-memory journal with an optional line sink. Each appended record is
/// written and flushed before `append` returns, so readers tailing the file
/// only ever see whole lines plus at most one partial trailing line.
pub struct Journal {
    header: JournalHeader,
    records: Vec<EventRecord>,
    sink: Option<Box<dyn Write + Send>>,
}

impl std::fmt::Debug for Journal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Journal")
            .field("header", &self.header)
            .field("records", &self.records.len())
            .field("sink", &self.sink.is_some())
            .finish()
    }
}

impl Journal {
    pub fn new(header: JournalHeader) -> Self {
        Journal {
            header,
            records: Vec::new(),
            sink: None,
        }
    }

    /// Starts writing to `sink`: the header and any records already held
    /// are written first.
    pub fn attach(&mut self, mut sink: Box<dyn Write + Send>) -> Result<(), JournalError> {
        writeln!(sink, "{}", self.header.to_line())?;
        for r in &self.records {
            writeln!(sink, "{}", r.to_line())?;
        }
        sink.flush()?;
        self.sink = Some(sink);
        Ok(())
    }

    pub fn create_file(&mut self, path: impl AsRef<Path>) -> Result<(), JournalError> {
        self.attach(Box::new(File::create(path)?))
    }

    pub fn header(&self) -> &JournalHeader {
        &self.header
    }

    pub fn records(&self) -> &[EventRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn append(&mut self, record: EventRecord) -> Result<(), JournalError> {
        if let Some(last) = self.records.last() {
            if (record.tick, record.sequence_in_tick) <= (last.tick, last.sequence_in_tick) {
                return Err(JournalError::Ordering {
                    tick: record.tick,
                    seq: record.sequence_in_tick,
                    last_tick: last.tick,
                    last_seq: last.sequence_in_tick,
                });
            }
            if record.rng_cursor < last.rng_cursor {
                return Err(JournalError::RngCursor {
                    cursor: record.rng_cursor,
                    last: last.rng_cursor,
                });
            }
        }
        if let Some(sink) = self.sink.as_mut() {
            writeln!(sink, "{}", record.to_line())?;
            sink.flush()?;
        }
        self.records.push(record);
        Ok(())
    }

    /// Header plus body as journal text.
    pub fn to_text(&self) -> String {
        let mut out = self.header.to_line();
        out.push('\n');
        for r in &self.records {
            out.push_str(&r.to_line());
            out.push('\n');
        }
        out
    }
}

/// A journal as read back from disk. Body lines are kept verbatim next to
/// their parse so replay can compare bytes and still locate damaged records.
#[derive(Debug, Clone)]
pub struct JournalFile {
    pub header: JournalHeader,
    pub lines: Vec<String>,
    pub records: Vec<Option<EventRecord>>,
}

impl JournalFile {
    pub fn parse(text: &str) -> Result<Self, JournalError> {
        let mut lines = text.split_inclusive('\n');
        let first = lines.next().ok_or_else(|| JournalError::Header("journal is empty".into()))?;
        let header: JournalHeader =
            serde_json::from_str(first.trim_end_matches('\n')).map_err(|e| JournalError::Header(e.to_string()))?;
        if header.schema != JOURNAL_SCHEMA {
            return Err(JournalError::Header(format!(
                "unsupported schema {:?}, expected {JOURNAL_SCHEMA:?}",
                header.schema
            )));
        }
        let mut body = Vec::new();
        let mut records = Vec::new();
        for raw in lines {
            let complete = raw.ends_with('\n');
            let line = raw.trim_end_matches('\n');
            let parsed = EventRecord::from_line(line).ok();
            // a writer interrupted mid-line leaves an unterminated fragment
            if !complete && parsed.is_none() {
                break;
            }
            body.push(line.to_string());
            records.push(parsed);
        }
        Ok(JournalFile {
            header,
            lines: body,
            records,
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, JournalError> {
        let bytes = std::fs::read(path)?;
        Self::parse(&String::from_utf8_lossy(&bytes))
    }

    /// Records that parsed, in file order.
    pub fn events(&self) -> impl Iterator<Item = &EventRecord> {
        self.records.iter().flatten()
    }
}
