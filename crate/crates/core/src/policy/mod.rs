//! Decision backends.
//!
//! A backend receives the assembled prompt (plus the structured state, for
//! backends that can use it) and answers with response text. The text is
//! always run through [`parse_actions`], so scripted, recorded and LLM
//! decisions take the same validation path and are journaled the same way.

pub mod parse;
pub mod recorded;
pub mod schema;
pub mod scripted;

#[cfg(feature = "llm")]
pub mod llm;

use thiserror::Error;

use crate::arena::{ArenaState, Registry};
use crate::interp::ActionRequest;
use crate::world::ArenaGeometry;

pub use parse::{parse_actions, ParsedActions, Rejection};
pub use recorded::RecordedPolicy;
pub use schema::{render_action_schema, ACTION_SCHEMA_VERSION};
pub use scripted::{ActionTemplate, ScriptedPolicy, ScriptedRule};

#[cfg(feature = "llm")]
pub use llm::LlmPolicy;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BackendError {
    #[error("transport failed after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("malformed backend reply: {0}")]
    Protocol(String),
    /// A failure replayed verbatim from a journal.
    #[error("{0}")]
    Recorded(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolicyError {
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("empty decision: {0}")]
    EmptyDecision(String),
}

/// One batched decision request covering every idle agent.
#[derive(Debug, Clone, Copy)]
pub struct PolicyRequest<'a> {
    pub prompt: &'a str,
    pub decidable_agents: &'a [String],
    pub tick: u64,
    pub state: &'a ArenaState,
    pub registry: &'a Registry,
    pub geometry: &'a ArenaGeometry,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackendReply {
    pub text: String,
    pub rationale: Option<String>,
}

pub trait PolicyBackend: Send {
    /// Stable name recorded in decision events.
    fn name(&self) -> &str;

    fn respond(&mut self, request: &PolicyRequest<'_>) -> Result<BackendReply, BackendError>;
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PolicyResponse {
    pub actions: Vec<ActionRequest>,
    pub rejections: Vec<Rejection>,
    pub rationale: Option<String>,
    /// Verbatim backend text, kept so the decision can be replayed offline.
    pub raw_text: String,
}

/// Failure of a decision call, with whatever text the backend produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionFailure {
    pub error: PolicyError,
    pub raw_text: Option<String>,
}

/// Runs one decision: asks the backend (unless nobody is decidable) and
/// parses the reply.
pub fn decide(backend: &mut dyn PolicyBackend, request: &PolicyRequest<'_>) -> Result<PolicyResponse, DecisionFailure> {
    if request.decidable_agents.is_empty() {
        return Ok(PolicyResponse::default());
    }
    let reply = backend.respond(request).map_err(|e| DecisionFailure {
        error: e.into(),
        raw_text: None,
    })?;
    match parse_actions(&reply.text, request.registry, request.geometry) {
        Ok(parsed) => Ok(PolicyResponse {
            actions: parsed.actions,
            rejections: parsed.rejections,
            rationale: reply.rationale,
            raw_text: reply.text,
        }),
        Err(error) => Err(DecisionFailure {
            error,
            raw_text: Some(reply.text),
        }),
    }
}
