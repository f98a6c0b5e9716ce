//! Predicates over the arena state, used by drive rules and scripted policy
//! rules.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arena::{ArenaState, DriveMode, Registry};
use crate::config::AgentKind;
use crate::world::{GridId, Point2};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConditionError {
    #[error("unknown agent {0}")]
    UnknownAgent(String),
    #[error("agent {0} has no tracked position")]
    NoPosition(String),
    #[error("trigger index {0} does not exist")]
    UnknownTrigger(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Condition {
    Always,
    /// Believed head-count summed over `grids` is at least `at_least`.
    Occupancy { grids: Vec<GridId>, at_least: u32 },
    /// The quadruped `agent` is within `meters` of `(x, y)`.
    QuadrupedWithin { agent: String, x: f64, y: f64, meters: f64 },
    /// The quadruped `agent` is farther than `meters` from `(x, y)`.
    QuadrupedBeyond { agent: String, x: f64, y: f64, meters: f64 },
    /// The tree's floor position is within `meters` of `(x, y)`.
    TreeWithin { x: f64, y: f64, meters: f64 },
    FogBetween { min: f64, max: f64 },
    /// At least one fog machine is emitting.
    FogEmitting,
    TickAtLeast { tick: u64 },
    TriggerArmed { index: usize },
    ModeIs { agent: String, mode: DriveMode },
    Idle { agent: String },
    All(Vec<Condition>),
    Any(Vec<Condition>),
    Not(Box<Condition>),
}

impl Condition {
    /// Checks references without evaluating.
    pub fn check(&self, registry: &Registry, trigger_count: usize) -> Result<(), ConditionError> {
        match self {
            Condition::QuadrupedWithin { agent, .. } | Condition::QuadrupedBeyond { agent, .. } => {
                let d = registry.get(agent).ok_or_else(|| ConditionError::UnknownAgent(agent.clone()))?;
                if d.kind != AgentKind::Quadruped {
                    return Err(ConditionError::NoPosition(agent.clone()));
                }
                Ok(())
            }
            Condition::ModeIs { agent, .. } | Condition::Idle { agent } => registry
                .get(agent)
                .map(|_| ())
                .ok_or_else(|| ConditionError::UnknownAgent(agent.clone())),
            Condition::TriggerArmed { index } if *index >= trigger_count => Err(ConditionError::UnknownTrigger(*index)),
            Condition::All(cs) | Condition::Any(cs) => cs.iter().try_for_each(|c| c.check(registry, trigger_count)),
            Condition::Not(c) => c.check(registry, trigger_count),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, state: &ArenaState, registry: &Registry) -> Result<bool, ConditionError> {
        Ok(match self {
            Condition::Always => true,
            Condition::Occupancy { grids, at_least } => state.occupancy.total(grids) >= *at_least as u64,
            Condition::QuadrupedWithin { agent, x, y, meters } => {
                quadruped_position(state, registry, agent)?.distance(Point2::new(*x, *y)) <= *meters
            }
            Condition::QuadrupedBeyond { agent, x, y, meters } => {
                quadruped_position(state, registry, agent)?.distance(Point2::new(*x, *y)) > *meters
            }
            Condition::TreeWithin { x, y, meters } => {
                let t = state.world.tree_position;
                Point2::new(t.x, t.y).distance(Point2::new(*x, *y)) <= *meters
            }
            Condition::FogBetween { min, max } => (*min..=*max).contains(&state.world.fog_density),
            Condition::FogEmitting => state.world.fog_emitting.values().any(|on| *on),
            Condition::TickAtLeast { tick } => state.tick >= *tick,
            Condition::TriggerArmed { index } => state.armed_triggers.contains(index),
            Condition::ModeIs { agent, mode } => {
                state
                    .agent_statuses
                    .get(agent)
                    .ok_or_else(|| ConditionError::UnknownAgent(agent.clone()))?
                    .mode
                    == *mode
            }
            Condition::Idle { agent } => {
                !state
                    .agent_statuses
                    .get(agent)
                    .ok_or_else(|| ConditionError::UnknownAgent(agent.clone()))?
                    .busy
            }
            Condition::All(cs) => {
                for c in cs {
                    if !c.eval(state, registry)? {
                        return Ok(false);
                    }
                }
                true
            }
            Condition::Any(cs) => {
                for c in cs {
                    if c.eval(state, registry)? {
                        return Ok(true);
                    }
                }
                false
            }
            Condition::Not(c) => !c.eval(state, registry)?,
        })
    }
}

fn quadruped_position(state: &ArenaState, registry: &Registry, agent: &str) -> Result<Point2, ConditionError> {
    if registry.get(agent).is_none() {
        return Err(ConditionError::UnknownAgent(agent.to_string()));
    }
    state
        .world
        .quadruped
        .as_ref()
        .filter(|q| q.agent_id == agent)
        .map(|q| q.pose.position())
        .ok_or_else(|| ConditionError::NoPosition(agent.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shapes() {
        let c: Condition = serde_json::from_str(r#""always""#).unwrap();
        assert_eq!(c, Condition::Always);
        let c: Condition = serde_json::from_str(
            r#"{"all":[{"occupancy":{"grids":[1,2],"at_least":2}},{"not":{"trigger_armed":{"index":0}}}]}"#,
        )
        .unwrap();
        assert!(matches!(c, Condition::All(ref v) if v.len() == 2));
        assert!(serde_json::from_str::<Condition>(r#"{"occupancy":{"grids":[0],"at_least":1}}"#).is_err());
    }
}
