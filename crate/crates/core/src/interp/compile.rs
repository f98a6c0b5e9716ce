use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::action::{Action, ActionRequest};
use super::dmx::Patch;
use super::fixture::{AngleError, FixtureKind, FixtureProfile};
use super::robot::{meters_to_mm, RobotCommand, RobotMotion};
use crate::world::geometry::Point2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InterpError {
    #[error("no fixture profile for agent {0}")]
    MissingProfile(String),
    #[error("fixture {fixture} cannot perform {action}")]
    WrongFixture { fixture: String, action: String },
    #[error(transparent)]
    Angle(#[from] AngleError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScreenUpdate {
    pub agent_id: String,
    pub content_label: String,
}

/// A device-level signal produced by the interpretation layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "signal", rename_all = "snake_case")]
pub enum DeviceSignal {
    Dmx {
        fixture_id: String,
        #[serde(with = "super::dmx::patch_keys")]
        patch: Patch,
        /// Set when an aim target was outside the fixture's reach.
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        clamped: bool,
    },
    Robot(RobotCommand),
    Screen(ScreenUpdate),
}

/// Compiles a validated action into the signal for its device.
///
/// `sequence` is the sequence number stamped on robot commands; it is
/// ignored for other devices.
pub fn compile(action: &ActionRequest, profiles: &[FixtureProfile], sequence: u16) -> Result<DeviceSignal, InterpError> {
    let agent = &action.agent_id;
    let profile = || {
        profiles
            .iter()
            .find(|p| &p.fixture_id == agent)
            .ok_or_else(|| InterpError::MissingProfile(agent.clone()))
    };
    let wrong = |p: &FixtureProfile| InterpError::WrongFixture {
        fixture: p.fixture_id.clone(),
        action: action.kind().to_string(),
    };
    match &action.action {
        Action::MoveTo { x, y } => Ok(DeviceSignal::Robot(RobotCommand {
            agent_id: agent.clone(),
            sequence,
            motion: RobotMotion::Goto2d {
                x_mm: meters_to_mm(*x),
                y_mm: meters_to_mm(*y),
            },
        })),
        Action::MoveTree { x, y, z } => Ok(DeviceSignal::Robot(RobotCommand {
            agent_id: agent.clone(),
            sequence,
            motion: RobotMotion::Place3d {
                x_mm: meters_to_mm(*x),
                y_mm: meters_to_mm(*y),
                z_mm: meters_to_mm(*z),
            },
        })),
        Action::SetFog { state } => {
            let p = profile()?;
            match p.kind {
                FixtureKind::Fog => Ok(DeviceSignal::Dmx {
                    fixture_id: p.fixture_id.clone(),
                    patch: Patch::from([(p.base_channel, if state.is_on() { 255 } else { 0 })]),
                    clamped: false,
                }),
                _ => Err(wrong(p)),
            }
        }
        Action::AimLight { x, y } => {
            let p = profile()?;
            match &p.kind {
                FixtureKind::MovingHead(head) => {
                    let aim = head.aim_at(Point2::new(*x, *y));
                    Ok(DeviceSignal::Dmx {
                        fixture_id: p.fixture_id.clone(),
                        patch: head.aim_patch(p.base_channel, &aim)?,
                        clamped: aim.clamped,
                    })
                }
                _ => Err(wrong(p)),
            }
        }
        Action::SetScreen { content } => Ok(DeviceSignal::Screen(ScreenUpdate {
            agent_id: agent.clone(),
            content_label: content.clone(),
        })),
    }
}
