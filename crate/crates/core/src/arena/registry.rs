use std::collections::{BTreeMap, HashMap};

use super::state::AgentStatus;
use crate::config::{AgentDescriptor, AgentKind, ConfigError, FaithConfig};

/// Agents known to the arena, in configuration order.
#[derive(Debug, Clone, Default)]
pub struct Registry {
    agents: Vec<AgentDescriptor>,
    index: HashMap<String, usize>,
}

/// Builds the registry for a configuration, checking id uniqueness and that
/// every declared capability fits the agent's kind.
pub fn register_agents(config: &FaithConfig) -> Result<Registry, ConfigError> {
    Registry::register(config)
}

impl Registry {
    pub fn register(config: &FaithConfig) -> Result<Registry, ConfigError> {
        Self::from_descriptors(config.agents.iter().cloned())
    }

    pub fn from_descriptors(descriptors: impl IntoIterator<Item = AgentDescriptor>) -> Result<Registry, ConfigError> {
        let mut reg = Registry::default();
        for d in descriptors {
            if reg.index.contains_key(&d.id) {
                return Err(ConfigError::DuplicateId(d.id));
            }
            let allowed = d.kind.allowed_actions();
            if let Some(bad) = d.capabilities().into_iter().find(|c| !allowed.contains(c)) {
                return Err(ConfigError::Capability {
                    agent: d.id,
                    kind: d.kind,
                    action: bad,
                });
            }
            reg.index.insert(d.id.clone(), reg.agents.len());
            reg.agents.push(d);
        }
        Ok(reg)
    }

    pub fn get(&self, id: &str) -> Option<&AgentDescriptor> {
        self.index.get(id).map(|&i| &self.agents[i])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &AgentDescriptor> {
        self.agents.iter()
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn ids_of_kind(&self, kind: AgentKind) -> impl Iterator<Item = &str> {
        self.agents.iter().filter(move |a| a.kind == kind).map(|a| a.id.as_str())
    }

    /// Every agent idle and not busy.
    pub fn initial_statuses(&self) -> BTreeMap<String, AgentStatus> {
        self.agents.iter().map(|a| (a.id.clone(), AgentStatus::default())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::DriveMode;
    use crate::interp::ActionKind;

    fn agent(id: &str, kind: AgentKind) -> AgentDescriptor {
        AgentDescriptor {
            id: id.into(),
            kind,
            purpose: format!("{id} purpose"),
            drive_rules: vec![],
            capabilities: None,
        }
    }

    #[test]
    fn empty_roster() {
        let reg = Registry::from_descriptors(vec![]).unwrap();
        assert!(reg.is_empty());
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let err = Registry::from_descriptors(vec![agent("a", AgentKind::Light), agent("a", AgentKind::Screen)]).unwrap_err();
        assert!(matches!(err, ConfigError::DuplicateId(ref id) if id == "a"));
    }

    #[test]
    fn capability_must_fit_kind() {
        let mut a = agent("q", AgentKind::Quadruped);
        a.capabilities = Some([ActionKind::AimLight].into());
        assert!(matches!(
            Registry::from_descriptors(vec![a]),
            Err(ConfigError::Capability { action: ActionKind::AimLight, .. })
        ));
    }

    #[test]
    fn installation_roster_registers_idle() {
        let roster = vec![
            agent("arm-1", AgentKind::RoboticArm),
            agent("arm-2", AgentKind::RoboticArm),
            agent("quadruped-1", AgentKind::Quadruped),
            agent("light-1", AgentKind::Light),
            agent("fog-1", AgentKind::FogMachine),
            agent("screen-1", AgentKind::Screen),
        ];
        let reg = Registry::from_descriptors(roster).unwrap();
        assert_eq!(reg.len(), 6);
        let statuses = reg.initial_statuses();
        assert_eq!(statuses.len(), 6);
        assert!(statuses.values().all(|s| s.mode == DriveMode::Idle && !s.busy));
    }
}
