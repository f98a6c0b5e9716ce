//! Fixture channel maps and moving-head aiming.
//!
//! Moving heads use an 8-slot layout starting at `base_channel`:
//! pan coarse, pan fine, tilt coarse, tilt fine, dimmer, red, green, blue.
//! Fog machines use a single output-level slot.
//!
//! Aiming convention: `pan` is the azimuth of the beam measured
//! counter-clockwise from the mount yaw, offset by `pan_home_deg`; `tilt` is
//! the beam's angle away from straight down, offset by `tilt_home_deg`. A
//! beam pointing straight down therefore sits at the home angles.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::dmx::{Patch, CHANNELS};
use crate::world::geometry::{Point2, Point3};

pub const DEFAULT_PAN_RANGE_DEG: f64 = 540.0;
pub const DEFAULT_TILT_RANGE_DEG: f64 = 270.0;
const FULL_SCALE: f64 = 65535.0;

pub const MOVING_HEAD_SLOTS: u16 = 8;
pub const FOG_SLOTS: u16 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AngleError {
    #[error("pan {value}° outside [0, {range})")]
    Pan { value: f64, range: f64 },
    #[error("tilt {value}° outside [0, {range})")]
    Tilt { value: f64, range: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MountPose {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// Azimuth of the fixture's pan reference, degrees counter-clockwise from +x.
    #[serde(default)]
    pub yaw_deg: f64,
}

impl MountPose {
    pub fn position(&self) -> Point3 {
        Point3::new(self.x, self.y, self.z)
    }
}

fn default_pan_range() -> f64 {
    DEFAULT_PAN_RANGE_DEG
}
fn default_tilt_range() -> f64 {
    DEFAULT_TILT_RANGE_DEG
}
fn default_cone() -> f64 {
    75.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MovingHead {
    pub mount: MountPose,
    #[serde(default = "default_pan_range")]
    pub pan_range_deg: f64,
    #[serde(default = "default_tilt_range")]
    pub tilt_range_deg: f64,
    #[serde(default)]
    pub pan_home_deg: f64,
    #[serde(default)]
    pub tilt_home_deg: f64,
    /// Largest reachable beam angle away from straight down.
    #[serde(default = "default_cone")]
    pub cone_half_angle_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FixtureKind {
    MovingHead(MovingHead),
    Fog,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureProfile {
    pub fixture_id: String,
    pub base_channel: u16,
    #[serde(flatten)]
    pub kind: FixtureKind,
}

/// Slot offsets within a moving-head layout.
pub mod slot {
    pub const PAN_COARSE: u16 = 0;
    pub const PAN_FINE: u16 = 1;
    pub const TILT_COARSE: u16 = 2;
    pub const TILT_FINE: u16 = 3;
    pub const DIMMER: u16 = 4;
    pub const RED: u16 = 5;
    pub const GREEN: u16 = 6;
    pub const BLUE: u16 = 7;
}

impl FixtureProfile {
    pub fn slot_count(&self) -> u16 {
        match self.kind {
            FixtureKind::MovingHead(_) => MOVING_HEAD_SLOTS,
            FixtureKind::Fog => FOG_SLOTS,
        }
    }

    /// Inclusive channel range owned by this fixture.
    pub fn channels(&self) -> std::ops::RangeInclusive<u16> {
        self.base_channel..=self.base_channel + self.slot_count() - 1
    }

    pub fn validate(&self) -> Result<(), String> {
        let last = self.base_channel as usize + self.slot_count() as usize - 1;
        if self.base_channel == 0 || last > CHANNELS {
            return Err(format!(
                "fixture {}: channels {}..={} do not fit in 1..=512",
                self.fixture_id, self.base_channel, last
            ));
        }
        if let FixtureKind::MovingHead(head) = &self.kind {
            let ok = head.pan_range_deg >= 360.0
                && head.tilt_range_deg > 0.0
                && head.pan_home_deg >= 0.0
                && head.tilt_home_deg >= 0.0
                && head.cone_half_angle_deg > 0.0
                && head.tilt_home_deg + head.cone_half_angle_deg < head.tilt_range_deg
                && [head.mount.x, head.mount.y, head.mount.z, head.mount.yaw_deg]
                    .iter()
                    .all(|v| v.is_finite());
            if !ok {
                return Err(format!("fixture {}: inconsistent moving-head angles", self.fixture_id));
            }
        }
        Ok(())
    }
}

fn quantize(angle: f64, range: f64) -> u16 {
    // round half up
    (angle / range * FULL_SCALE + 0.5).floor() as u16
}

/// Quantizes pan/tilt over the default 540°/270° ranges to
/// `(pan_coarse, pan_fine, tilt_coarse, tilt_fine)`.
pub fn angles_to_channels(pan: f64, tilt: f64) -> Result<[u8; 4], AngleError> {
    angles_to_channels_in(pan, tilt, DEFAULT_PAN_RANGE_DEG, DEFAULT_TILT_RANGE_DEG)
}

pub fn angles_to_channels_in(pan: f64, tilt: f64, pan_range: f64, tilt_range: f64) -> Result<[u8; 4], AngleError> {
    if !(0.0..pan_range).contains(&pan) {
        return Err(AngleError::Pan { value: pan, range: pan_range });
    }
    if !(0.0..tilt_range).contains(&tilt) {
        return Err(AngleError::Tilt { value: tilt, range: tilt_range });
    }
    let [pc, pf] = quantize(pan, pan_range).to_be_bytes();
    let [tc, tf] = quantize(tilt, tilt_range).to_be_bytes();
    Ok([pc, pf, tc, tf])
}

/// Inverse of the quantizer for a 16-bit channel pair.
pub fn channels_to_angle(coarse: u8, fine: u8, range: f64) -> f64 {
    u16::from_be_bytes([coarse, fine]) as f64 / FULL_SCALE * range
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AimSolution {
    pub pan_deg: f64,
    pub tilt_deg: f64,
    /// The target was outside the reachable cone and the beam was clamped
    /// to the cone edge.
    pub clamped: bool,
}

impl MovingHead {
    /// Pan/tilt that point the beam at floor point `target`.
    pub fn aim_at(&self, target: Point2) -> AimSolution {
        let (dx, dy) = (target.x - self.mount.x, target.y - self.mount.y);
        let horizontal = dx.hypot(dy);
        let off_vertical = horizontal.atan2(self.mount.z).to_degrees();
        let azimuth = if horizontal == 0.0 {
            0.0
        } else {
            dy.atan2(dx).to_degrees() - self.mount.yaw_deg
        };
        let (off_vertical, clamped) = if off_vertical > self.cone_half_angle_deg {
            (self.cone_half_angle_deg, true)
        } else {
            (off_vertical, false)
        };
        let mut pan = (self.pan_home_deg + azimuth).rem_euclid(360.0);
        if pan >= 360.0 {
            pan = 0.0;
        }
        AimSolution {
            pan_deg: pan,
            tilt_deg: self.tilt_home_deg + off_vertical,
            clamped,
        }
    }

    /// Floor point hit by the beam at the given angles, if it points below
    /// the horizon.
    pub fn floor_point(&self, pan_deg: f64, tilt_deg: f64) -> Option<Point2> {
        let off_vertical = (tilt_deg - self.tilt_home_deg).to_radians();
        if !(0.0..std::f64::consts::FRAC_PI_2).contains(&off_vertical) || self.mount.z <= 0.0 {
            return None;
        }
        let azimuth = (pan_deg - self.pan_home_deg + self.mount.yaw_deg).to_radians();
        let reach = self.mount.z * off_vertical.tan();
        Some(Point2::new(
            self.mount.x + reach * azimuth.cos(),
            self.mount.y + reach * azimuth.sin(),
        ))
    }

    /// Channel patch (relative to `base`) for an aim solution with the dimmer at full.
    pub fn aim_patch(&self, base: u16, aim: &AimSolution) -> Result<Patch, AngleError> {
        let [pc, pf, tc, tf] = angles_to_channels_in(aim.pan_deg, aim.tilt_deg, self.pan_range_deg, self.tilt_range_deg)?;
        Ok(Patch::from([
            (base + slot::PAN_COARSE, pc),
            (base + slot::PAN_FINE, pf),
            (base + slot::TILT_COARSE, tc),
            (base + slot::TILT_FINE, tf),
            (base + slot::DIMMER, 255),
        ]))
    }
}
