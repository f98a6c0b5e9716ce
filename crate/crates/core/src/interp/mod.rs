//! Interpretation layer: discrete actions to device signals.

pub mod action;
pub mod compile;
pub mod dmx;
pub mod fixture;
pub mod robot;

pub use action::{Action, ActionKind, ActionRequest, FogSwitch};
pub use compile::{compile, DeviceSignal, InterpError, ScreenUpdate};
pub use dmx::{DmxError, DmxUniverse, FrameKind, Patch};
pub use fixture::{angles_to_channels, FixtureKind, FixtureProfile, MountPose, MovingHead};
pub use robot::{decode_robot_command, encode_robot_command, RobotCodecError, RobotCommand, RobotMotion};
