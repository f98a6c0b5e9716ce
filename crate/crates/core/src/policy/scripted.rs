//! Deterministic rule-table backend.
//!
//! Rules are tried in order; the first whose `when` condition holds supplies
//! the decision. Each template becomes at most one action, and templates for
//! agents that are not decidable this tick are skipped.

use serde::{Deserialize, Serialize};

use super::{parse, BackendError, BackendReply, PolicyBackend, PolicyRequest};
use crate::arena::{ArenaState, Registry};
use crate::condition::Condition;
use crate::interp::{Action, ActionRequest};
use crate::world::{ArenaGeometry, GridId, Point2, ARRIVAL_RADIUS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ActionTemplate {
    Fixed(ActionRequest),
    /// Walk a loop of waypoints: head for the nearest one, and once there,
    /// for the one after it.
    Patrol { agent: String, waypoints: Vec<Point2> },
    /// Aim at the centroid of one exterior cell.
    AimAtGrid { agent: String, grid: GridId },
    /// Aim at whichever of `grids` holds the most people (first on ties).
    AimAtBusiest { agent: String, grids: Vec<GridId> },
}

impl ActionTemplate {
    pub fn agent(&self) -> &str {
        match self {
            ActionTemplate::Fixed(a) => &a.agent_id,
            ActionTemplate::Patrol { agent, .. }
            | ActionTemplate::AimAtGrid { agent, .. }
            | ActionTemplate::AimAtBusiest { agent, .. } => agent,
        }
    }

    pub fn instantiate(&self, state: &ArenaState, geometry: &ArenaGeometry) -> Option<ActionRequest> {
        match self {
            ActionTemplate::Fixed(a) => Some(a.clone()),
            ActionTemplate::Patrol { agent, waypoints } => {
                let here = state
                    .world
                    .quadruped
                    .as_ref()
                    .filter(|q| &q.agent_id == agent)?
                    .pose
                    .position();
                let (nearest, dist) = waypoints
                    .iter()
                    .enumerate()
                    .map(|(i, w)| (i, w.distance(here)))
                    .min_by(|a, b| a.1.total_cmp(&b.1))?;
                let next = if dist <= ARRIVAL_RADIUS {
                    (nearest + 1) % waypoints.len()
                } else {
                    nearest
                };
                let w = waypoints[next];
                Some(ActionRequest::new(agent.clone(), Action::MoveTo { x: w.x, y: w.y }))
            }
            ActionTemplate::AimAtGrid { agent, grid } => {
                let c = geometry.grid_centroid(*grid);
                Some(ActionRequest::new(agent.clone(), Action::AimLight { x: c.x, y: c.y }))
            }
            ActionTemplate::AimAtBusiest { agent, grids } => {
                let best = grids
                    .iter()
                    .copied()
                    .rev()
                    .max_by_key(|&g| state.occupancy.get(g))?;
                let c = geometry.grid_centroid(best);
                Some(ActionRequest::new(agent.clone(), Action::AimLight { x: c.x, y: c.y }))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptedRule {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub when: Condition,
    pub actions: Vec<ActionTemplate>,
}

impl ScriptedRule {
    /// Load-time check: conditions resolve and templates name registered
    /// agents that accept the templated action.
    pub fn check(&self, registry: &Registry, trigger_count: usize, geometry: &ArenaGeometry) -> Result<(), String> {
        self.when.check(registry, trigger_count).map_err(|e| e.to_string())?;
        for t in &self.actions {
            let agent = registry
                .get(t.agent())
                .ok_or_else(|| format!("template names unknown agent {}", t.agent()))?;
            let kind = match t {
                ActionTemplate::Fixed(a) => {
                    parse::validate(a, registry, geometry)?;
                    continue;
                }
                ActionTemplate::Patrol { waypoints, .. } => {
                    if waypoints.is_empty() || !waypoints.iter().all(|w| geometry.contains_interior(*w)) {
                        return Err("patrol waypoints must be non-empty and inside the interior".into());
                    }
                    crate::interp::ActionKind::MoveTo
                }
                ActionTemplate::AimAtBusiest { grids, .. } if grids.is_empty() => {
                    return Err("aim_at_busiest needs at least one grid".into());
                }
                ActionTemplate::AimAtGrid { .. } | ActionTemplate::AimAtBusiest { .. } => crate::interp::ActionKind::AimLight,
            };
            if !agent.accepts(kind) {
                return Err(format!("agent {} does not accept {kind}", agent.id));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct ScriptedPolicy {
    rules: Vec<ScriptedRule>,
}

impl ScriptedPolicy {
    pub fn new(rules: Vec<ScriptedRule>) -> Self {
        ScriptedPolicy { rules }
    }
}

impl PolicyBackend for ScriptedPolicy {
    fn name(&self) -> &str {
        "scripted"
    }

    fn respond(&mut self, request: &PolicyRequest<'_>) -> Result<BackendReply, BackendError> {
        for (i, rule) in self.rules.iter().enumerate() {
            let holds = rule
                .when
                .eval(request.state, request.registry)
                .map_err(|e| BackendError::Protocol(format!("scripted rule {i}: {e}")))?;
            if !holds {
                continue;
            }
            let actions: Vec<ActionRequest> = rule
                .actions
                .iter()
                .filter(|t| request.decidable_agents.iter().any(|a| a == t.agent()))
                .filter_map(|t| t.instantiate(request.state, request.geometry))
                .collect();
            let text = serde_json::to_string(&actions).map_err(|e| BackendError::Protocol(e.to_string()))?;
            return Ok(BackendReply {
                text,
                rationale: Some(rule.name.clone().unwrap_or_else(|| format!("rule {i}"))),
            });
        }
        Ok(BackendReply {
            text: "[]".into(),
            rationale: None,
        })
    }
}
