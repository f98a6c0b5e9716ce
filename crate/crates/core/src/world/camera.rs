//! The quadruped's camera: a planar sector test against exterior cell centroids.

use serde::{Deserialize, Serialize};

use super::geometry::{ArenaGeometry, GridId};
use super::quadruped::Pose;
use super::Audience;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraParams {
    /// Half of the horizontal field of view, in degrees.
    pub half_angle_deg: f64,
    pub range: f64,
}

impl Default for CameraParams {
    fn default() -> Self {
        CameraParams {
            half_angle_deg: 45.0,
            range: 5.0,
        }
    }
}

impl CameraParams {
    pub fn is_valid(&self) -> bool {
        self.half_angle_deg > 0.0 && self.half_angle_deg < 180.0 && self.range > 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub tick: u64,
    pub grid: GridId,
    pub observed_count: u32,
}

fn wrap_angle(a: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let r = a.rem_euclid(two_pi);
    if r > std::f64::consts::PI {
        r - two_pi
    } else {
        r
    }
}

/// Cells whose centroid falls inside the camera's sector, regardless of
/// occupancy.
pub fn visible_cells(pose: Pose, camera: CameraParams, geometry: &ArenaGeometry) -> Vec<GridId> {
    let half = camera.half_angle_deg.to_radians();
    GridId::all()
        .filter(|&grid| {
            let c = geometry.grid_centroid(grid);
            let (dx, dy) = (c.x - pose.x, c.y - pose.y);
            if dx.hypot(dy) > camera.range {
                return false;
            }
            let bearing = wrap_angle(dy.atan2(dx) - pose.heading);
            bearing.abs() <= half
        })
        .collect()
}

/// One report per visible cell with nonzero occupancy, in grid order.
pub fn detect_audience(
    pose: Pose,
    audience: &Audience,
    camera: CameraParams,
    geometry: &ArenaGeometry,
    tick: u64,
) -> Vec<DetectionReport> {
    visible_cells(pose, camera, geometry)
        .into_iter()
        .filter_map(|grid| {
            let count = audience.get(grid);
            (count > 0).then_some(DetectionReport {
                tick,
                grid,
                observed_count: count,
            })
        })
        .collect()
}
