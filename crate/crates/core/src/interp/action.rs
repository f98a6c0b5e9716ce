use std::fmt;

use serde::{Deserialize, Serialize};

use crate::world::geometry::{ArenaGeometry, Point2, Point3};

/// Longest accepted screen content label, in bytes.
pub const MAX_LABEL_LEN: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKind {
    MoveTo,
    MoveTree,
    SetFog,
    AimLight,
    SetScreen,
}

impl ActionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ActionKind::MoveTo => "move_to",
            ActionKind::MoveTree => "move_tree",
            ActionKind::SetFog => "set_fog",
            ActionKind::AimLight => "aim_light",
            ActionKind::SetScreen => "set_screen",
        }
    }
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FogSwitch {
    On,
    Off,
}

impl FogSwitch {
    pub fn is_on(self) -> bool {
        self == FogSwitch::On
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum Action {
    MoveTo { x: f64, y: f64 },
    MoveTree { x: f64, y: f64, z: f64 },
    SetFog { state: FogSwitch },
    AimLight { x: f64, y: f64 },
    SetScreen { content: String },
}

impl Action {
    pub fn kind(&self) -> ActionKind {
        match self {
            Action::MoveTo { .. } => ActionKind::MoveTo,
            Action::MoveTree { .. } => ActionKind::MoveTree,
            Action::SetFog { .. } => ActionKind::SetFog,
            Action::AimLight { .. } => ActionKind::AimLight,
            Action::SetScreen { .. } => ActionKind::SetScreen,
        }
    }

    /// Checks the parameters against the installation's physical bounds.
    pub fn check_bounds(&self, geometry: &ArenaGeometry) -> Result<(), String> {
        match self {
            Action::MoveTo { x, y } => {
                if geometry.contains_interior(Point2::new(*x, *y)) {
                    Ok(())
                } else {
                    Err(format!("move_to target ({x}, {y}) is outside the interior floor"))
                }
            }
            Action::MoveTree { x, y, z } => {
                if geometry.contains_volume(Point3::new(*x, *y, *z)) {
                    Ok(())
                } else {
                    Err(format!("move_tree target ({x}, {y}, {z}) is outside the interior volume"))
                }
            }
            Action::AimLight { x, y } => {
                if geometry.contains_floor(Point2::new(*x, *y)) {
                    Ok(())
                } else {
                    Err(format!("aim_light target ({x}, {y}) is off the floor"))
                }
            }
            Action::SetScreen { content } => {
                if content.trim().is_empty() || content.len() > MAX_LABEL_LEN {
                    Err(format!("set_screen label must be 1..={MAX_LABEL_LEN} bytes"))
                } else {
                    Ok(())
                }
            }
            Action::SetFog { .. } => Ok(()),
        }
    }
}

/// One element of the discrete action space, addressed to one agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionRequest {
    #[serde(rename = "agent")]
    pub agent_id: String,
    #[serde(flatten)]
    pub action: Action,
}

impl ActionRequest {
    pub fn new(agent_id: impl Into<String>, action: Action) -> Self {
        ActionRequest {
            agent_id: agent_id.into(),
            action,
        }
    }

    pub fn kind(&self) -> ActionKind {
        self.action.kind()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wire_shape() {
        let a: ActionRequest =
            serde_json::from_str(r#"{"agent":"quadruped-1","action":"move_to","x":1.0,"y":2.0}"#).unwrap();
        assert_eq!(a, ActionRequest::new("quadruped-1", Action::MoveTo { x: 1.0, y: 2.0 }));
        let fog: ActionRequest = serde_json::from_str(r#"{"agent":"fog-1","action":"set_fog","state":"off"}"#).unwrap();
        assert_eq!(fog.action, Action::SetFog { state: FogSwitch::Off });
        assert_eq!(
            serde_json::to_string(&fog).unwrap(),
            r#"{"agent":"fog-1","action":"set_fog","state":"off"}"#
        );
    }

    #[test]
    fn bounds() {
        let g = ArenaGeometry::default();
        assert!(Action::MoveTo { x: 6.0, y: 0.0 }.check_bounds(&g).is_ok());
        assert!(Action::MoveTo { x: 6.1, y: 0.0 }.check_bounds(&g).is_err());
        assert!(Action::MoveTree { x: 1.0, y: 1.0, z: 3.5 }.check_bounds(&g).is_err());
        assert!(Action::AimLight { x: -1.0, y: 7.0 }.check_bounds(&g).is_ok());
        assert!(Action::AimLight { x: -2.0, y: 7.0 }.check_bounds(&g).is_err());
        assert!(Action::MoveTo { x: f64::NAN, y: 1.0 }.check_bounds(&g).is_err());
        assert!(Action::SetScreen { content: " ".into() }.check_bounds(&g).is_err());
    }
}
