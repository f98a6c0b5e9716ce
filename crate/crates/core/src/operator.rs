//! Live steering commands issued by an operator.

use serde::{Deserialize, Serialize};

use crate::arena::{ArenaState, DriveMode, Registry};
use crate::world::GridId;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CommandKind {
    Pause,
    Resume,
    InjectAudience { grid: GridId, delta: i32 },
    SetDriveMode { agent_id: String, mode: DriveMode },
    UpdateMacroText { text: String },
    StepOnce,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorCommand {
    #[serde(flatten)]
    pub kind: CommandKind,
    /// Tick that was current when the command was accepted; filled in by the
    /// arena on submission.
    #[serde(default)]
    pub issued_at_tick: u64,
}

impl OperatorCommand {
    pub fn new(kind: CommandKind) -> Self {
        OperatorCommand { kind, issued_at_tick: 0 }
    }

    /// Rejects commands that could never apply cleanly: unknown agents,
    /// empty directives, or removing more people than a cell holds.
    pub fn validate(&self, state: &ArenaState, registry: &Registry) -> Result<(), String> {
        match &self.kind {
            CommandKind::InjectAudience { grid, delta } => {
                if state.world.audience.checked_add(*grid, *delta).is_none() {
                    return Err(format!(
                        "grid {grid} holds {} people; cannot apply delta {delta}",
                        state.world.audience.get(*grid)
                    ));
                }
            }
            CommandKind::SetDriveMode { agent_id, .. } if !registry.contains(agent_id) => {
                return Err(format!("unknown agent {agent_id}"));
            }
            CommandKind::UpdateMacroText { text } if text.trim().is_empty() => {
                return Err("macro text must not be empty".into());
            }
            _ => {}
        }
        Ok(())
    }
}
