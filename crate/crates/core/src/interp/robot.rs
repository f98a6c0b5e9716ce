//! Wire format for commands sent to the simulated robot controllers.
//!
//! ```text
//! A7 E1 | opcode | seq (u16 BE) | coords (i32 BE × 2 or 3) | xor
//! ```
//!
//! `goto_2d` (0x01) carries x, y; `place_3d` (0x02) carries x, y, z. All
//! coordinates are millimeters. The trailing byte is the XOR of every byte
//! before it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MAGIC: [u8; 2] = [0xA7, 0xE1];
pub const OP_GOTO_2D: u8 = 0x01;
pub const OP_PLACE_3D: u8 = 0x02;

const HEADER_LEN: usize = 5;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RobotCodecError {
    #[error("frame too short ({0} bytes)")]
    Truncated(usize),
    #[error("bad magic {0:02X} {1:02X}")]
    BadMagic(u8, u8),
    #[error("unknown opcode {0:#04x}")]
    UnknownOpcode(u8),
    #[error("frame length {got} does not match opcode (expected {expected})")]
    Length { expected: usize, got: usize },
    #[error("checksum mismatch: frame says {stored:#04x}, computed {computed:#04x}")]
    Checksum { stored: u8, computed: u8 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "opcode", rename_all = "snake_case")]
pub enum RobotMotion {
    Goto2d { x_mm: i32, y_mm: i32 },
    Place3d { x_mm: i32, y_mm: i32, z_mm: i32 },
}

impl RobotMotion {
    pub fn opcode(&self) -> u8 {
        match self {
            RobotMotion::Goto2d { .. } => OP_GOTO_2D,
            RobotMotion::Place3d { .. } => OP_PLACE_3D,
        }
    }

    fn coords(&self) -> Vec<i32> {
        match *self {
            RobotMotion::Goto2d { x_mm, y_mm } => vec![x_mm, y_mm],
            RobotMotion::Place3d { x_mm, y_mm, z_mm } => vec![x_mm, y_mm, z_mm],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RobotCommand {
    pub agent_id: String,
    pub sequence: u16,
    pub motion: RobotMotion,
}

/// Meters to whole millimeters, rounding half away from zero.
pub fn meters_to_mm(m: f64) -> i32 {
    (m * 1000.0).round() as i32
}

pub fn mm_to_meters(mm: i32) -> f64 {
    mm as f64 / 1000.0
}

fn frame_len(opcode: u8) -> Option<usize> {
    match opcode {
        OP_GOTO_2D => Some(HEADER_LEN + 8 + 1),
        OP_PLACE_3D => Some(HEADER_LEN + 12 + 1),
        _ => None,
    }
}

fn xor(bytes: &[u8]) -> u8 {
    bytes.iter().fold(0, |acc, b| acc ^ b)
}

/// Encodes the command; the agent id travels out of band (one link per robot).
pub fn encode_robot_command(cmd: &RobotCommand) -> Vec<u8> {
    let coords = cmd.motion.coords();
    let mut out = Vec::with_capacity(HEADER_LEN + coords.len() * 4 + 1);
    out.extend_from_slice(&MAGIC);
    out.push(cmd.motion.opcode());
    out.extend_from_slice(&cmd.sequence.to_be_bytes());
    for c in coords {
        out.extend_from_slice(&c.to_be_bytes());
    }
    out.push(xor(&out));
    out
}

pub fn decode_robot_command(agent_id: &str, bytes: &[u8]) -> Result<RobotCommand, RobotCodecError> {
    if bytes.len() < HEADER_LEN + 1 {
        return Err(RobotCodecError::Truncated(bytes.len()));
    }
    if bytes[..2] != MAGIC {
        return Err(RobotCodecError::BadMagic(bytes[0], bytes[1]));
    }
    let opcode = bytes[2];
    let expected = frame_len(opcode).ok_or(RobotCodecError::UnknownOpcode(opcode))?;
    if bytes.len() != expected {
        return Err(RobotCodecError::Length {
            expected,
            got: bytes.len(),
        });
    }
    let (body, stored) = bytes.split_at(expected - 1);
    let computed = xor(body);
    if computed != stored[0] {
        return Err(RobotCodecError::Checksum {
            stored: stored[0],
            computed,
        });
    }
    let sequence = u16::from_be_bytes([bytes[3], bytes[4]]);
    let coord = |i: usize| {
        let at = HEADER_LEN + i * 4;
        i32::from_be_bytes(bytes[at..at + 4].try_into().expect("4-byte slice"))
    };
    let motion = match opcode {
        OP_GOTO_2D => RobotMotion::Goto2d {
            x_mm: coord(0),
            y_mm: coord(1),
        },
        _ => RobotMotion::Place3d {
            x_mm: coord(0),
            y_mm: coord(1),
            z_mm: coord(2),
        },
    };
    Ok(RobotCommand {
        agent_id: agent_id.to_string(),
        sequence,
        motion,
    })
}
