use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::interp::ActionRequest;
use crate::world::{Audience, DetectionReport, WorldState};

/// Behavioral mode selected by an agent's drive rules.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriveMode {
    Exploratory,
    Protective,
    #[default]
    Idle,
    Performing,
}

impl DriveMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DriveMode::Exploratory => "exploratory",
            DriveMode::Protective => "protective",
            DriveMode::Idle => "idle",
            DriveMode::Performing => "performing",
        }
    }
}

impl fmt::Display for DriveMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AgentStatus {
    pub mode: DriveMode,
    /// Set on dispatch, cleared by the agent's completion report.
    pub busy: bool,
    pub last_action: Option<ActionRequest>,
    pub last_report: String,
    pub updated_at_tick: u64,
}

/// Authoritative snapshot of the arena between ticks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArenaState {
    /// Number of ticks completed; the next tick to run.
    pub tick: u64,
    pub agent_statuses: BTreeMap<String, AgentStatus>,
    pub world: WorldState,
    /// Reports from the most recent tick.
    pub detections: Vec<DetectionReport>,
    pub armed_triggers: BTreeSet<usize>,
    /// The arena's belief about audience per cell: the last count the camera
    /// saw there, or zero once the camera saw the cell empty.
    pub occupancy: Audience,
}

impl ArenaState {
    pub fn is_busy(&self, agent: &str) -> bool {
        self.agent_statuses.get(agent).is_some_and(|s| s.busy)
    }
}
