//! Go-to-goal controller standing in for the quadruped's onboard locomotion.

use serde::{Deserialize, Serialize};

use super::geometry::Point2;

/// Distance at which the quadruped counts as having reached its target.
pub const ARRIVAL_RADIUS: f64 = 0.05;

/// Planar pose. `heading` is in radians, counter-clockwise from `+x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl Pose {
    pub fn position(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerOutcome {
    pub pose: Pose,
    pub arrived: bool,
}

/// Moves straight toward `target` at `min(max_speed, distance / dt)`.
///
/// The heading turns to face the direction of travel; a stationary step
/// keeps the previous heading.
pub fn quadruped_controller(pose: Pose, target: Point2, dt: f64, max_speed: f64) -> ControllerOutcome {
    let (dx, dy) = (target.x - pose.x, target.y - pose.y);
    let distance = dx.hypot(dy);
    if distance <= ARRIVAL_RADIUS {
        return ControllerOutcome { pose, arrived: true };
    }
    let travel = (max_speed * dt).min(distance);
    let (ux, uy) = (dx / distance, dy / distance);
    let next = if travel >= distance {
        Pose {
            x: target.x,
            y: target.y,
            heading: dy.atan2(dx),
        }
    } else {
        Pose {
            x: pose.x + ux * travel,
            y: pose.y + uy * travel,
            heading: dy.atan2(dx),
        }
    };
    let remaining = (target.x - next.x).hypot(target.y - next.y);
    ControllerOutcome {
        pose: next,
        arrived: remaining <= ARRIVAL_RADIUS,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn at_target_is_unchanged_and_arrived() {
        let pose = Pose { x: 2.0, y: 2.0, heading: 0.3 };
        let out = quadruped_controller(pose, Point2::new(2.0, 2.0), 1.0, 0.5);
        assert_eq!(out.pose, pose);
        assert!(out.arrived);
    }

    #[test]
    fn half_meter_step_toward_target() {
        let pose = Pose { x: 1.0, y: 1.0, heading: 0.0 };
        let out = quadruped_controller(pose, Point2::new(1.0, 2.0), 1.0, 0.5);
        assert!((out.pose.x - 1.0).abs() < 1e-12);
        assert!((out.pose.y - 1.5).abs() < 1e-12);
        assert!((out.pose.heading - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!(!out.arrived);
    }

    #[test]
    fn long_distance_advances_exactly_speed_times_dt() {
        // 6-8-10 triangle: unit bearing (0.6, 0.8)
        let pose = Pose { x: 0.0, y: 0.0, heading: 0.0 };
        let out = quadruped_controller(pose, Point2::new(6.0, 8.0), 1.0, 0.5);
        assert!((out.pose.x - 0.3).abs() < 1e-12);
        assert!((out.pose.y - 0.4).abs() < 1e-12);
    }

    #[test]
    fn final_step_lands_on_target() {
        let pose = Pose { x: 0.0, y: 0.0, heading: 0.0 };
        let out = quadruped_controller(pose, Point2::new(0.3, 0.0), 1.0, 0.5);
        assert_eq!((out.pose.x, out.pose.y), (0.3, 0.0));
        assert!(out.arrived);
    }
}
