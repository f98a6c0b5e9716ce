//! Scripted audience scenarios: `(tick, grid, delta)` records applied at the
//! start of each tick.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::geometry::GridId;
use super::Audience;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("reading scenario {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parsing scenario: {0}")]
    Parse(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioEvent {
    pub tick: u64,
    pub grid: GridId,
    pub delta: i32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Scenario {
    pub events: Vec<ScenarioEvent>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let mut s: Scenario = serde_json::from_str(text)?;
        // stable: records for the same tick keep file order
        s.events.sort_by_key(|e| e.tick);
        Ok(s)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn events_at(&self, tick: u64) -> impl Iterator<Item = &ScenarioEvent> {
        self.events.iter().filter(move |e| e.tick == tick)
    }

    /// Applies this tick's records; occupancy saturates at zero.
    pub fn apply(&self, tick: u64, audience: &mut Audience) {
        for e in self.events_at(tick) {
            audience.add_saturating(e.grid, e.delta);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_applies() {
        let s = Scenario::from_json(r#"[{"tick":2,"grid":1,"delta":3},{"tick":1,"grid":1,"delta":-1}]"#).unwrap();
        assert_eq!(s.events[0].tick, 1);
        let mut a = Audience::default();
        s.apply(1, &mut a);
        assert_eq!(a.get(GridId::new(1).unwrap()), 0);
        s.apply(2, &mut a);
        assert_eq!(a.get(GridId::new(1).unwrap()), 3);
    }

    #[test]
    fn rejects_bad_grid() {
        assert!(Scenario::from_json(r#"[{"tick":0,"grid":13,"delta":1}]"#).is_err());
    }
}
