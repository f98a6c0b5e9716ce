//! Extracting and validating the action array from free-form response text.

use serde::{Deserialize, Serialize};

use super::PolicyError;
use crate::arena::Registry;
use crate::interp::ActionRequest;
use crate::world::ArenaGeometry;

/// Responses larger than this are refused outright.
pub const MAX_RESPONSE_BYTES: usize = 256 * 1024;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    /// Position within the parsed array.
    pub index: usize,
    pub agent: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParsedActions {
    pub actions: Vec<ActionRequest>,
    pub rejections: Vec<Rejection>,
}

/// Byte offset one past the bracket that closes the `[` at `start`, skipping
/// over JSON string literals.
fn matching_bracket(bytes: &[u8], start: usize) -> Option<usize> {
    let mut depth = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    for (i, &b) in bytes.iter().enumerate().skip(start) {
        if in_string {
            match b {
                _ if escaped => escaped = false,
                b'\\' => escaped = true,
                b'"' => in_string = false,
                _ => {}
            }
            continue;
        }
        match b {
            b'"' => in_string = true,
            b'[' => depth += 1,
            b']' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i + 1);
                }
            }
            _ => {}
        }
    }
    None
}

/// The first balanced `[...]` span that deserializes as an action array.
pub fn find_action_array(text: &str) -> Option<Vec<ActionRequest>> {
    let bytes = text.as_bytes();
    bytes
        .iter()
        .enumerate()
        .filter(|(_, &b)| b == b'[')
        .find_map(|(start, _)| {
            let end = matching_bracket(bytes, start)?;
            // '[' and ']' are ASCII, so both offsets are char boundaries
            serde_json::from_str::<Vec<ActionRequest>>(&text[start..end]).ok()
        })
}

/// Parses the response and validates each action against the registry and
/// the installation bounds. Invalid actions are rejected individually; the
/// rest are kept in source order.
pub fn parse_actions(text: &str, registry: &Registry, geometry: &ArenaGeometry) -> Result<ParsedActions, PolicyError> {
    if text.len() > MAX_RESPONSE_BYTES {
        return Err(PolicyError::EmptyDecision(format!(
            "response of {} bytes exceeds the {MAX_RESPONSE_BYTES}-byte limit",
            text.len()
        )));
    }
    let array = find_action_array(text)
        .ok_or_else(|| PolicyError::EmptyDecision("no action array matching the schema".into()))?;
    let mut out = ParsedActions::default();
    for (index, action) in array.into_iter().enumerate() {
        match validate(&action, registry, geometry) {
            Ok(()) => out.actions.push(action),
            Err(reason) => out.rejections.push(Rejection {
                index,
                agent: action.agent_id.clone(),
                reason,
            }),
        }
    }
    Ok(out)
}

pub fn validate(action: &ActionRequest, registry: &Registry, geometry: &ArenaGeometry) -> Result<(), String> {
    let agent = registry
        .get(&action.agent_id)
        .ok_or_else(|| format!("unknown agent {}", action.agent_id))?;
    if !agent.accepts(action.kind()) {
        return Err(format!("agent {} ({}) does not accept {}", agent.id, agent.kind, action.kind()));
    }
    action.action.check_bounds(geometry)
}
