//! The meso tier: drive rules turn the world snapshot into per-agent modes.

use std::collections::BTreeMap;

use thiserror::Error;

use super::registry::Registry;
use super::state::{ArenaState, DriveMode};
use crate::condition::ConditionError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("drive rule of agent {agent} (priority {priority}): {source}")]
pub struct DriveError {
    pub agent: String,
    pub priority: u32,
    #[source]
    pub source: ConditionError,
}

/// Picks, for each agent, the mode of its lowest-priority-number rule whose
/// condition holds; agents with no satisfied rule keep their current mode.
pub fn evaluate_drives(state: &ArenaState, registry: &Registry) -> Result<BTreeMap<String, DriveMode>, DriveError> {
    let mut modes = BTreeMap::new();
    for agent in registry.iter() {
        let current = state.agent_statuses.get(&agent.id).map(|s| s.mode).unwrap_or_default();
        let mut rules: Vec<_> = agent.drive_rules.iter().collect();
        rules.sort_by_key(|r| r.priority);
        let mut chosen = current;
        for rule in rules {
            let holds = rule.condition.eval(state, registry).map_err(|source| DriveError {
                agent: agent.id.clone(),
                priority: rule.priority,
                source,
            })?;
            if holds {
                chosen = rule.target_mode;
                break;
            }
        }
        modes.insert(agent.id.clone(), chosen);
    }
    Ok(modes)
}
