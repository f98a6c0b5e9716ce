use std::collections::BTreeMap;

use super::{BackendError, BackendReply, PolicyBackend, PolicyRequest};

/// What the backend said at one tick of a recorded run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RecordedReply {
    Reply(BackendReply),
    Failure(String),
}

/// Plays back journaled decisions keyed by tick, so runs made against a
/// live model can be replayed offline.
#[derive(Debug, Clone)]
pub struct RecordedPolicy {
    name: String,
    replies: BTreeMap<u64, RecordedReply>,
}

impl RecordedPolicy {
    pub fn new(name: impl Into<String>, replies: BTreeMap<u64, RecordedReply>) -> Self {
        RecordedPolicy {
            name: name.into(),
            replies,
        }
    }
}

impl PolicyBackend for RecordedPolicy {
    fn name(&self) -> &str {
        &self.name
    }

    fn respond(&mut self, request: &PolicyRequest<'_>) -> Result<BackendReply, BackendError> {
        match self.replies.get(&request.tick) {
            Some(RecordedReply::Reply(r)) => Ok(r.clone()),
            Some(RecordedReply::Failure(msg)) => Err(BackendError::Recorded(msg.clone())),
            None => Err(BackendError::Recorded(format!("no recorded decision for tick {}", request.tick))),
        }
    }
}
