//! Deterministic simulation of the installation: the quadruped scout, the
//! arms placing the tree, fog, moving-head lights, screens and the audience
//! standing in the 12 exterior cells.

pub mod camera;
pub mod fog;
pub mod geometry;
pub mod quadruped;
pub mod rng;
pub mod scenario;

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::interp::dmx::DmxUniverse;
use crate::interp::fixture::{channels_to_angle, slot, FixtureKind, FixtureProfile};
use crate::interp::robot::{mm_to_meters, RobotMotion};
use crate::interp::DeviceSignal;

pub use camera::{detect_audience, visible_cells, CameraParams, DetectionReport};
pub use fog::{fog_step, FogParams};
pub use geometry::{ArenaGeometry, GeometryError, GridId, Point2, Point3, GRID_COUNT};
pub use quadruped::{quadruped_controller, Pose, ARRIVAL_RADIUS};
pub use rng::SimRng;
pub use scenario::{Scenario, ScenarioEvent};

/// Audience head-count per exterior cell.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Audience([u32; GRID_COUNT as usize]);

impl Audience {
    pub fn get(&self, grid: GridId) -> u32 {
        self.0[grid.get() as usize - 1]
    }

    pub fn set(&mut self, grid: GridId, count: u32) {
        self.0[grid.get() as usize - 1] = count;
    }

    pub fn add_saturating(&mut self, grid: GridId, delta: i32) {
        let next = (self.get(grid) as i64 + delta as i64).clamp(0, u32::MAX as i64);
        self.set(grid, next as u32);
    }

    /// Like [`add_saturating`](Self::add_saturating) but refuses to go negative.
    pub fn checked_add(&self, grid: GridId, delta: i32) -> Option<u32> {
        let next = self.get(grid) as i64 + delta as i64;
        (0..=u32::MAX as i64).contains(&next).then_some(next as u32)
    }

    pub fn total(&self, grids: &[GridId]) -> u64 {
        grids.iter().map(|&g| self.get(g) as u64).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (GridId, u32)> + '_ {
        GridId::all().map(move |g| (g, self.get(g)))
    }
}

/// Random walk-ups and departures per cell per tick. Zero probabilities
/// consume no random draws.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AudienceModel {
    pub arrival_prob: f64,
    pub departure_prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimParams {
    /// Quadruped speed cap, m/s.
    pub max_speed: f64,
    /// Arm placement speed, m/s.
    pub arm_speed: f64,
    pub fog: FogParams,
    pub camera: CameraParams,
    pub quadruped_start: Pose,
    pub audience_model: AudienceModel,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            max_speed: 0.5,
            arm_speed: 0.25,
            fog: FogParams::default(),
            camera: CameraParams::default(),
            quadruped_start: Pose {
                x: 3.0,
                y: 3.0,
                heading: 0.0,
            },
            audience_model: AudienceModel::default(),
        }
    }
}

impl SimParams {
    pub fn validate(&self, geometry: &ArenaGeometry) -> Result<(), String> {
        if !(self.max_speed > 0.0 && self.arm_speed > 0.0) {
            return Err("max_speed and arm_speed must be positive".into());
        }
        if !(self.fog.emission_rate > 0.0 && self.fog.decay_rate > 0.0) {
            return Err("fog emission and decay rates must be positive".into());
        }
        if !self.camera.is_valid() {
            return Err("camera half-angle must be in (0, 180) and range positive".into());
        }
        if !geometry.contains_interior(self.quadruped_start.position()) || !self.quadruped_start.heading.is_finite() {
            return Err("quadruped_start must lie inside the interior".into());
        }
        let probs = [self.audience_model.arrival_prob, self.audience_model.departure_prob];
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err("audience model probabilities must lie in [0, 1]".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadrupedState {
    pub agent_id: String,
    pub pose: Pose,
    pub target: Option<Point2>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ArmState {
    /// Last tick of the current placement, if one is in progress.
    pub busy_until: Option<u64>,
    pub target: Option<Point3>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LightState {
    pub pan_deg: f64,
    pub tilt_deg: f64,
    pub dimmer: u8,
    pub r: u8,
    pub g: u8,
    pub b: u8,
    /// Floor point under the beam, when it points below the horizon.
    pub aim: Option<Point2>,
}

/// Which agents finished something during a step, in the order it happened.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Completion {
    pub agent_id: String,
    pub report: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    pub quadruped: Option<QuadrupedState>,
    pub tree_position: Point3,
    pub arms: BTreeMap<String, ArmState>,
    pub fog_density: f64,
    pub fog_emitting: BTreeMap<String, bool>,
    pub lights: BTreeMap<String, LightState>,
    pub screens: BTreeMap<String, String>,
    pub audience: Audience,
    pub dmx: DmxUniverse,
}

/// Everything `step` needs besides the state itself.
#[derive(Debug, Clone, Copy)]
pub struct StepContext<'a> {
    pub tick: u64,
    pub dt: f64,
    pub params: &'a SimParams,
    pub profiles: &'a [FixtureProfile],
    pub geometry: &'a ArenaGeometry,
}

fn fmt_m(v: f64) -> String {
    format!("{v:.3}")
}

impl WorldState {
    /// Initial state for the given rosters; lights are decoded from an
    /// all-zero universe.
    pub fn new(
        quadruped: Option<&str>,
        arms: &[&str],
        screens: &[&str],
        params: &SimParams,
        profiles: &[FixtureProfile],
        geometry: &ArenaGeometry,
    ) -> Self {
        let mut w = WorldState {
            quadruped: quadruped.map(|id| QuadrupedState {
                agent_id: id.to_string(),
                pose: params.quadruped_start,
                target: None,
            }),
            tree_position: geometry.tree_home,
            arms: arms.iter().map(|a| (a.to_string(), ArmState::default())).collect(),
            fog_density: 0.0,
            fog_emitting: BTreeMap::new(),
            lights: BTreeMap::new(),
            screens: screens.iter().map(|s| (s.to_string(), String::new())).collect(),
            audience: Audience::default(),
            dmx: DmxUniverse::new(),
        };
        for p in profiles {
            w.decode_fixture(p);
        }
        w
    }

    fn decode_fixture(&mut self, profile: &FixtureProfile) {
        let at = |offset: u16| self.dmx.channels()[(profile.base_channel + offset) as usize - 1];
        match &profile.kind {
            FixtureKind::Fog => {
                let on = at(0) > 0;
                self.fog_emitting.insert(profile.fixture_id.clone(), on);
            }
            FixtureKind::MovingHead(head) => {
                let pan = channels_to_angle(at(slot::PAN_COARSE), at(slot::PAN_FINE), head.pan_range_deg);
                let tilt = channels_to_angle(at(slot::TILT_COARSE), at(slot::TILT_FINE), head.tilt_range_deg);
                let state = LightState {
                    pan_deg: pan,
                    tilt_deg: tilt,
                    dimmer: at(slot::DIMMER),
                    r: at(slot::RED),
                    g: at(slot::GREEN),
                    b: at(slot::BLUE),
                    aim: head.floor_point(pan, tilt),
                };
                self.lights.insert(profile.fixture_id.clone(), state);
            }
        }
    }

    /// Advances the world by one tick: applies pending signals, moves the
    /// quadruped, completes arm placements, integrates fog and runs the
    /// stochastic audience model.
    pub fn step(&self, ctx: &StepContext<'_>, signals: &[DeviceSignal], rng: &mut SimRng) -> (WorldState, Vec<Completion>) {
        let mut next = self.clone();
        let mut done = Vec::new();

        for signal in signals {
            next.apply_signal(ctx, signal, &mut done);
        }

        if let Some(q) = next.quadruped.as_mut() {
            if let Some(target) = q.target {
                let out = quadruped_controller(q.pose, target, ctx.dt, ctx.params.max_speed);
                q.pose = out.pose;
                if out.arrived {
                    q.target = None;
                    done.push(Completion {
                        agent_id: q.agent_id.clone(),
                        report: format!("arrived at ({}, {})", fmt_m(q.pose.x), fmt_m(q.pose.y)),
                    });
                }
            }
        }

        for (id, arm) in next.arms.iter_mut() {
            if let (Some(until), Some(target)) = (arm.busy_until, arm.target) {
                if ctx.tick >= until {
                    next.tree_position = target;
                    arm.busy_until = None;
                    arm.target = None;
                    done.push(Completion {
                        agent_id: id.clone(),
                        report: format!(
                            "tree placed at ({}, {}, {})",
                            fmt_m(target.x),
                            fmt_m(target.y),
                            fmt_m(target.z)
                        ),
                    });
                }
            }
        }

        let emitters = next.fog_emitting.values().filter(|on| **on).count();
        let fog = FogParams {
            emission_rate: ctx.params.fog.emission_rate * emitters.max(1) as f64,
            decay_rate: ctx.params.fog.decay_rate,
        };
        next.fog_density = fog_step(next.fog_density, emitters > 0, ctx.dt, fog);

        let model = ctx.params.audience_model;
        if model.arrival_prob > 0.0 || model.departure_prob > 0.0 {
            for grid in GridId::all() {
                if model.arrival_prob > 0.0 && rng.random_bool(model.arrival_prob) {
                    next.audience.add_saturating(grid, 1);
                }
                if model.departure_prob > 0.0 && next.audience.get(grid) > 0 && rng.random_bool(model.departure_prob) {
                    next.audience.add_saturating(grid, -1);
                }
            }
        }

        (next, done)
    }

    fn apply_signal(&mut self, ctx: &StepContext<'_>, signal: &DeviceSignal, done: &mut Vec<Completion>) {
        match signal {
            DeviceSignal::Dmx { fixture_id, patch, .. } => {
                // patches were checked against the profile when compiled
                if let Ok(u) = self.dmx.apply_patch(patch) {
                    self.dmx = u;
                }
                if let Some(p) = ctx.profiles.iter().find(|p| &p.fixture_id == fixture_id) {
                    self.decode_fixture(p);
                }
                let report = match (self.lights.get(fixture_id), self.fog_emitting.get(fixture_id)) {
                    (Some(light), _) => match light.aim {
                        Some(a) => format!("aimed at ({}, {})", fmt_m(a.x), fmt_m(a.y)),
                        None => "aimed above the horizon".to_string(),
                    },
                    (None, Some(true)) => "fog on".to_string(),
                    (None, Some(false)) => "fog off".to_string(),
                    (None, None) => "dmx applied".to_string(),
                };
                done.push(Completion {
                    agent_id: fixture_id.clone(),
                    report,
                });
            }
            DeviceSignal::Robot(cmd) => match cmd.motion {
                RobotMotion::Goto2d { x_mm, y_mm } => {
                    if let Some(q) = self.quadruped.as_mut().filter(|q| q.agent_id == cmd.agent_id) {
                        q.target = Some(Point2::new(mm_to_meters(x_mm), mm_to_meters(y_mm)));
                    }
                }
                RobotMotion::Place3d { x_mm, y_mm, z_mm } => {
                    let target = Point3::new(mm_to_meters(x_mm), mm_to_meters(y_mm), mm_to_meters(z_mm));
                    let distance = self.tree_position.distance(target);
                    let ticks = ((distance / (ctx.params.arm_speed * ctx.dt)).ceil() as u64).max(1);
                    if let Some(arm) = self.arms.get_mut(&cmd.agent_id) {
                        arm.busy_until = Some(ctx.tick + ticks - 1);
                        arm.target = Some(target);
                    }
                }
            },
            DeviceSignal::Screen(update) => {
                self.screens.insert(update.agent_id.clone(), update.content_label.clone());
                done.push(Completion {
                    agent_id: update.agent_id.clone(),
                    report: format!("showing {}", update.content_label),
                });
            }
        }
    }
}
