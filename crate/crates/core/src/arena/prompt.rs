//! Global prompt assembly.
//!
//! Sections always appear in the same order: directive, goal, agents,
//! status, detections, triggers, decide-for list, action schema. Numbers are
//! printed with fixed precision so equal inputs give identical bytes.

use std::fmt::Write;

use super::registry::Registry;
use super::state::ArenaState;
use crate::config::FaithConfig;
use crate::policy::schema::render_action_schema;

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Agents the policy may address this tick: registered and not busy.
pub fn decidable_agents(state: &ArenaState, registry: &Registry) -> Vec<String> {
    registry
        .iter()
        .filter(|a| !state.is_busy(&a.id))
        .map(|a| a.id.clone())
        .collect()
}

pub fn assemble_global_prompt(config: &FaithConfig, state: &ArenaState) -> String {
    let mut out = String::new();
    // writing into a String cannot fail
    let _ = write_prompt(&mut out, config, state);
    out
}

fn write_prompt(out: &mut String, config: &FaithConfig, state: &ArenaState) -> std::fmt::Result {
    writeln!(out, "## directive")?;
    writeln!(out, "{}", config.macro_text.trim())?;
    writeln!(out)?;
    writeln!(out, "## goal")?;
    writeln!(out, "{}", config.system_goal.trim())?;
    writeln!(out)?;

    writeln!(out, "## agents")?;
    for agent in &config.agents {
        let status = state.agent_statuses.get(&agent.id).cloned().unwrap_or_default();
        writeln!(out, "- id: {}", agent.id)?;
        writeln!(out, "  kind: {}", agent.kind)?;
        writeln!(out, "  purpose: {}", one_line(&agent.purpose))?;
        writeln!(out, "  mode: {}", status.mode)?;
        writeln!(out, "  busy: {}", status.busy)?;
        let report = if status.last_report.is_empty() {
            "none".to_string()
        } else {
            one_line(&status.last_report)
        };
        writeln!(out, "  last_report: {report}")?;
    }
    writeln!(out)?;

    let w = &state.world;
    writeln!(out, "## status")?;
    writeln!(out, "tick: {}", state.tick)?;
    if let Some(q) = &w.quadruped {
        writeln!(
            out,
            "{} pose: x={:.3} y={:.3} heading={:.3}",
            q.agent_id, q.pose.x, q.pose.y, q.pose.heading
        )?;
    }
    writeln!(
        out,
        "tree: x={:.3} y={:.3} z={:.3}",
        w.tree_position.x, w.tree_position.y, w.tree_position.z
    )?;
    writeln!(out, "fog_density: {:.3}", w.fog_density)?;
    for (id, light) in &w.lights {
        match light.aim {
            Some(a) => writeln!(out, "{id} aim: x={:.3} y={:.3} dimmer={}", a.x, a.y, light.dimmer)?,
            None => writeln!(out, "{id} aim: none dimmer={}", light.dimmer)?,
        }
    }
    for (id, label) in &w.screens {
        writeln!(out, "{id} showing: {}", if label.is_empty() { "nothing" } else { label })?;
    }
    writeln!(out)?;

    writeln!(out, "## detections")?;
    if state.detections.is_empty() {
        writeln!(out, "detections: none")?;
    } else {
        for d in &state.detections {
            writeln!(out, "- grid {}: {} observed", d.grid, d.observed_count)?;
        }
    }
    writeln!(out)?;

    writeln!(out, "## triggers")?;
    if state.armed_triggers.is_empty() {
        writeln!(out, "armed: none")?;
    } else {
        for &i in &state.armed_triggers {
            if let Some(rule) = config.trigger_rules.get(i) {
                writeln!(out, "- {}", one_line(&rule.effect_hint))?;
            }
        }
    }
    writeln!(out)?;

    writeln!(out, "## decide for")?;
    let idle: Vec<&str> = config
        .agents
        .iter()
        .filter(|a| !state.is_busy(&a.id))
        .map(|a| a.id.as_str())
        .collect();
    writeln!(out, "{}", if idle.is_empty() { "none".to_string() } else { idle.join(", ") })?;
    writeln!(out)?;

    writeln!(out, "## action schema")?;
    writeln!(out, "{}", render_action_schema())
}
