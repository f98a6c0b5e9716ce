//! The artist-authored configuration document.
//!
//! One JSON document describes the overarching directive, the installation
//! geometry, every agent with its purpose and drive rules, the crowd trigger
//! rules, DMX fixture profiles, simulation constants and the policy backend
//! settings.

use std::collections::{BTreeSet, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::arena::{DriveMode, Registry};
use crate::condition::Condition;
use crate::interp::fixture::{FixtureKind, FixtureProfile};
use crate::interp::ActionKind;
use crate::policy::scripted::ScriptedRule;
use crate::world::{ArenaGeometry, GridId, SimParams};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parsing config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("duplicate agent id {0:?}")]
    DuplicateId(String),
    #[error("agent {agent:?} of kind {kind} cannot accept {action}")]
    Capability {
        agent: String,
        kind: AgentKind,
        action: ActionKind,
    },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentKind {
    Quadruped,
    RoboticArm,
    Light,
    FogMachine,
    Screen,
}

impl AgentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AgentKind::Quadruped => "quadruped",
            AgentKind::RoboticArm => "robotic_arm",
            AgentKind::Light => "light",
            AgentKind::FogMachine => "fog_machine",
            AgentKind::Screen => "screen",
        }
    }

    /// The action kinds an agent of this kind may accept.
    pub fn allowed_actions(self) -> BTreeSet<ActionKind> {
        let kinds: &[ActionKind] = match self {
            AgentKind::Quadruped => &[ActionKind::MoveTo],
            AgentKind::RoboticArm => &[ActionKind::MoveTree],
            AgentKind::Light => &[ActionKind::AimLight],
            AgentKind::FogMachine => &[ActionKind::SetFog],
            AgentKind::Screen => &[ActionKind::SetScreen],
        };
        kinds.iter().copied().collect()
    }
}

impl std::fmt::Display for AgentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveRule {
    pub condition: Condition,
    pub target_mode: DriveMode,
    /// Lower wins.
    pub priority: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentDescriptor {
    pub id: String,
    pub kind: AgentKind,
    pub purpose: String,
    #[serde(default)]
    pub drive_rules: Vec<DriveRule>,
    /// Defaults to everything the kind allows.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capabilities: Option<BTreeSet<ActionKind>>,
}

impl AgentDescriptor {
    pub fn capabilities(&self) -> BTreeSet<ActionKind> {
        self.capabilities.clone().unwrap_or_else(|| self.kind.allowed_actions())
    }

    pub fn accepts(&self, kind: ActionKind) -> bool {
        self.capabilities().contains(&kind)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriggerRule {
    pub watched_grids: Vec<GridId>,
    pub min_occupancy: u32,
    pub dwell_ticks: u32,
    pub effect_hint: String,
}

fn default_base_url() -> String {
    "https://api.openai.com/v1".into()
}
fn default_model() -> String {
    "o1-mini".into()
}
fn default_key_env() -> String {
    "OPENAI_API_KEY".into()
}
fn default_retries() -> u32 {
    2
}
fn default_timeout_ms() -> u64 {
    10_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LlmConfig {
    #[serde(default = "default_base_url")]
    pub base_url: String,
    #[serde(default = "default_model")]
    pub model: String,
    /// Name of the environment variable holding the bearer token.
    #[serde(default = "default_key_env")]
    pub api_key_env: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
    #[serde(default = "default_retries")]
    pub retries: u32,
    #[serde(default = "default_timeout_ms")]
    pub timeout_ms: u64,
}

impl Default for LlmConfig {
    fn default() -> Self {
        LlmConfig {
            base_url: default_base_url(),
            model: default_model(),
            api_key_env: default_key_env(),
            temperature: None,
            retries: default_retries(),
            timeout_ms: default_timeout_ms(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicyConfig {
    pub scripted: Vec<ScriptedRule>,
    pub llm: LlmConfig,
}

fn default_tick_period() -> u64 {
    500
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaithConfig {
    pub macro_text: String,
    #[serde(default)]
    pub system_goal: String,
    #[serde(default = "default_tick_period")]
    pub tick_period_ms: u64,
    #[serde(default)]
    pub rng_seed: u64,
    #[serde(default)]
    pub arena_geometry: ArenaGeometry,
    pub agents: Vec<AgentDescriptor>,
    #[serde(default)]
    pub trigger_rules: Vec<TriggerRule>,
    #[serde(default)]
    pub fixtures: Vec<FixtureProfile>,
    #[serde(default)]
    pub sim: SimParams,
    #[serde(default)]
    pub policy: PolicyConfig,
}

impl FaithConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Reads and validates a configuration file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let config = Self::from_json(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn tick_seconds(&self) -> f64 {
        self.tick_period_ms as f64 / 1000.0
    }

    /// SHA-256 over the canonical JSON encoding.
    pub fn content_hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    /// Checks every document-level invariant, including those that
    /// [`Registry::register`] enforces.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        if self.macro_text.trim().is_empty() {
            return invalid("macro_text must not be empty".into());
        }
        if self.tick_period_ms == 0 {
            return invalid("tick_period_ms must be positive".into());
        }
        self.arena_geometry
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.sim
            .validate(&self.arena_geometry)
            .map_err(|e| ConfigError::Invalid(format!("sim: {e}")))?;

        let registry = Registry::register(self)?;
        let quadrupeds = self.agents.iter().filter(|a| a.kind == AgentKind::Quadruped).count();
        if quadrupeds > 1 {
            return invalid("at most one quadruped scout is supported".into());
        }

        let triggers = self.trigger_rules.len();
        for agent in &self.agents {
            let mut priorities = HashSet::new();
            for rule in &agent.drive_rules {
                if !priorities.insert(rule.priority) {
                    return invalid(format!("agent {}: duplicate drive priority {}", agent.id, rule.priority));
                }
                rule.condition.check(&registry, triggers).map_err(|e| {
                    ConfigError::Invalid(format!("agent {} drive rule (priority {}): {e}", agent.id, rule.priority))
                })?;
            }
        }

        for (i, t) in self.trigger_rules.iter().enumerate() {
            if t.watched_grids.is_empty() || t.dwell_ticks == 0 {
                return invalid(format!("trigger {i}: watched_grids must be non-empty and dwell_ticks >= 1"));
            }
        }

        let mut owned: Vec<(u16, u16, &str)> = Vec::new();
        for p in &self.fixtures {
            p.validate().map_err(ConfigError::Invalid)?;
            let agent = registry
                .get(&p.fixture_id)
                .ok_or_else(|| ConfigError::Invalid(format!("fixture {} does not name an agent", p.fixture_id)))?;
            let fits = matches!(
                (&p.kind, agent.kind),
                (FixtureKind::MovingHead(_), AgentKind::Light) | (FixtureKind::Fog, AgentKind::FogMachine)
            );
            if !fits {
                return invalid(format!("fixture {} does not match agent kind {}", p.fixture_id, agent.kind));
            }
            let range = p.channels();
            if let Some((_, _, other)) = owned
                .iter()
                .find(|(lo, hi, _)| *range.start() <= *hi && *lo <= *range.end())
            {
                return invalid(format!("fixture {} overlaps channels of {other}", p.fixture_id));
            }
            owned.push((*range.start(), *range.end(), &p.fixture_id));
        }
        for a in &self.agents {
            if matches!(a.kind, AgentKind::Light | AgentKind::FogMachine)
                && !self.fixtures.iter().any(|p| p.fixture_id == a.id)
            {
                return invalid(format!("agent {} has no fixture profile", a.id));
            }
        }

        for (i, rule) in self.policy.scripted.iter().enumerate() {
            rule.check(&registry, triggers, &self.arena_geometry)
                .map_err(|e| ConfigError::Invalid(format!("scripted rule {i}: {e}")))?;
        }
        Ok(())
    }
}
