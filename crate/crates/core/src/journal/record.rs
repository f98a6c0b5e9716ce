use serde::{Deserialize, Serialize};

use crate::arena::DriveMode;
use crate::interp::{ActionRequest, DeviceSignal};
use crate::operator::OperatorCommand;
use crate::world::{DetectionReport, ScenarioEvent};

/// Where an action was turned away.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectionStage {
    /// Failed registry or geometry validation while parsing the response.
    Parse,
    /// Valid on its own but not dispatchable this tick.
    Dispatch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum EventPayload {
    TickAdvanced {
        /// Scenario records applied at the start of the tick.
        scenario: Vec<ScenarioEvent>,
    },
    Detection(DetectionReport),
    DriveChange {
        agent: String,
        from: DriveMode,
        to: DriveMode,
    },
    TriggerArmed {
        index: usize,
        effect_hint: String,
    },
    TriggerDisarmed {
        index: usize,
    },
    Decision {
        backend: String,
        decidable_agents: Vec<String>,
        actions: Vec<ActionRequest>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rationale: Option<String>,
        raw_text: String,
    },
    Dispatch {
        action: ActionRequest,
        signal: DeviceSignal,
        /// Wire frame for robot commands, hex encoded.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        frame: Option<String>,
    },
    Rejection {
        agent: String,
        stage: RejectionStage,
        reason: String,
    },
    StatusReport {
        agent: String,
        report: String,
    },
    BackendError {
        backend: String,
        error: String,
        /// Response text, when the backend answered but nothing parsed.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        raw_text: Option<String>,
    },
    OperatorCommand(OperatorCommand),
}

impl EventPayload {
    pub fn kind(&self) -> &'static str {
        match self {
            EventPayload::TickAdvanced { .. } => "tick_advanced",
            EventPayload::Detection(_) => "detection",
            EventPayload::DriveChange { .. } => "drive_change",
            EventPayload::TriggerArmed { .. } => "trigger_armed",
            EventPayload::TriggerDisarmed { .. } => "trigger_disarmed",
            EventPayload::Decision { .. } => "decision",
            EventPayload::Dispatch { .. } => "dispatch",
            EventPayload::Rejection { .. } => "rejection",
            EventPayload::StatusReport { .. } => "status_report",
            EventPayload::BackendError { .. } => "backend_error",
            EventPayload::OperatorCommand(_) => "operator_command",
        }
    }
}

/// One journal line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub tick: u64,
    pub sequence_in_tick: u32,
    #[serde(flatten)]
    pub payload: EventPayload,
    /// Random draws consumed before this record was emitted.
    pub rng_cursor: u64,
}

impl EventRecord {
    pub fn kind(&self) -> &'static str {
        self.payload.kind()
    }

    /// The record's journal line, without the trailing newline.
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("event records serialize")
    }

    pub fn from_line(line: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(line)
    }
}
