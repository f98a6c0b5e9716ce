//! Re-executing a journaled run and comparing it record by record.
//!
//! Scripted runs are re-executed with the scripted backend built from the
//! embedded configuration. Runs against any other backend are fed their
//! journaled decisions through [`RecordedPolicy`]. Journaled operator
//! commands are re-queued ahead of the tick they were applied in.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{EventPayload, JournalError, JournalFile};
use crate::arena::{Arena, ArenaError, ArenaState};
use crate::config::FaithConfig;
use crate::policy::recorded::RecordedReply;
use crate::policy::{BackendReply, PolicyBackend, RecordedPolicy, ScriptedPolicy};

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error(transparent)]
    Journal(#[from] JournalError),
    #[error("config hash {found} does not match the journal's {expected}")]
    ConfigMismatch { expected: String, found: String },
    #[error(transparent)]
    Arena(#[from] ArenaError),
}

/// First point where the replayed stream differs from the journal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divergence {
    /// Zero-based index into the journal body.
    pub index: usize,
    /// Journaled line, absent if the replay produced more records.
    pub expected: Option<String>,
    /// Replayed line, absent if the replay produced fewer records.
    pub actual: Option<String>,
}

impl std::fmt::Display for Divergence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "divergence at record {}", self.index)?;
        writeln!(f, "  journal: {}", self.expected.as_deref().unwrap_or("<end of journal>"))?;
        write!(f, "  replay:  {}", self.actual.as_deref().unwrap_or("<end of replay>"))
    }
}

#[derive(Debug, Clone)]
pub struct ReplayReport {
    pub final_state: ArenaState,
    pub records_compared: usize,
    pub divergence: Option<Divergence>,
}

/// Replays `journal`. When `config` is given it must hash to the value in
/// the header; otherwise the embedded configuration is used and checked the
/// same way.
pub fn replay(config: Option<&FaithConfig>, journal: &JournalFile) -> Result<ReplayReport, ReplayError> {
    let header = &journal.header;
    let config = config.cloned().unwrap_or_else(|| header.config.clone());
    let found = config.content_hash();
    if found != header.config_hash {
        return Err(ReplayError::ConfigMismatch {
            expected: header.config_hash.clone(),
            found,
        });
    }

    let backend: Box<dyn PolicyBackend> = if header.backend == "scripted" {
        Box::new(ScriptedPolicy::new(config.policy.scripted.clone()))
    } else {
        Box::new(RecordedPolicy::new(header.backend.clone(), recorded_replies(journal)))
    };
    let mut arena = Arena::new(config, header.scenario.clone(), header.seed, backend)?;

    let ticks = journal.events().map(|r| r.tick + 1).max().unwrap_or(0);
    let mut commands: BTreeMap<u64, Vec<_>> = BTreeMap::new();
    for r in journal.events() {
        if let EventPayload::OperatorCommand(c) = &r.payload {
            commands.entry(r.tick).or_default().push(c.clone());
        }
    }

    let mut replayed = Vec::new();
    for tick in 0..ticks {
        for c in commands.remove(&tick).unwrap_or_default() {
            arena.submit_unchecked(c);
        }
        replayed.extend(arena.run_tick()?.iter().map(|r| r.to_line()));
    }

    let divergence = (0..journal.lines.len().max(replayed.len()))
        .find(|&i| journal.lines.get(i) != replayed.get(i))
        .map(|index| Divergence {
            index,
            expected: journal.lines.get(index).cloned(),
            actual: replayed.get(index).cloned(),
        });
    Ok(ReplayReport {
        final_state: arena.state().clone(),
        records_compared: journal.lines.len().min(replayed.len()),
        divergence,
    })
}

/// Backend replies by tick, rebuilt from decision and backend-error events.
fn recorded_replies(journal: &JournalFile) -> BTreeMap<u64, RecordedReply> {
    let mut out = BTreeMap::new();
    for r in journal.events() {
        let reply = match &r.payload {
            EventPayload::Decision { rationale, raw_text, .. } => RecordedReply::Reply(BackendReply {
                text: raw_text.clone(),
                rationale: rationale.clone(),
            }),
            EventPayload::BackendError {
                raw_text: Some(text), ..
            } => RecordedReply::Reply(BackendReply {
                text: text.clone(),
                rationale: None,
            }),
            EventPayload::BackendError { error, .. } => RecordedReply::Failure(error.clone()),
            _ => continue,
        };
        out.insert(r.tick, reply);
    }
    out
}
