//! The arena: agent registry, drives, triggers, prompt assembly and the tick
//! loop that closes the feedback cycle between policy and world.

mod drive;
mod prompt;
mod registry;
mod state;
mod tick;
mod trigger;

use std::collections::{BTreeMap, VecDeque};
use std::path::Path;

use thiserror::Error;

pub use drive::{evaluate_drives, DriveError};
pub use prompt::{assemble_global_prompt, decidable_agents};
pub use registry::{register_agents, Registry};
pub use state::{AgentStatus, ArenaState, DriveMode};
pub use trigger::evaluate_triggers;

use crate::config::{AgentKind, ConfigError, FaithConfig};
use crate::interp::DeviceSignal;
use crate::journal::{Journal, JournalError, JournalHeader};
use crate::operator::OperatorCommand;
use crate::policy::{PolicyBackend, PolicyError};
use crate::world::{Audience, Scenario, SimRng, WorldState};

#[derive(Debug, Error)]
pub enum ArenaError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Drive(#[from] DriveError),
    #[error(transparent)]
    Journal(#[from] JournalError),
}

/// Owns all mutable run state. Every mutation happens in [`Arena::run_tick`]
/// or in the queueing of operator commands it later drains.
pub struct Arena {
    config: FaithConfig,
    registry: Registry,
    scenario: Scenario,
    backend: Box<dyn PolicyBackend>,
    state: ArenaState,
    rng: SimRng,
    journal: Journal,
    /// Signals dispatched last tick, applied by the next world step.
    pending: Vec<DeviceSignal>,
    /// Occupancy beliefs of recent ticks, oldest first.
    history: VecDeque<Audience>,
    history_len: usize,
    robot_sequence: BTreeMap<String, u16>,
    commands: VecDeque<OperatorCommand>,
    last_backend_error: Option<PolicyError>,
}

impl Arena {
    /// Validates `config` and builds the tick-0 state. `seed` replaces the
    /// configured seed.
    pub fn new(
        config: FaithConfig,
        scenario: Scenario,
        seed: u64,
        backend: Box<dyn PolicyBackend>,
    ) -> Result<Arena, ArenaError> {
        config.validate()?;
        let registry = Registry::register(&config)?;
        let header = JournalHeader::new(&config, &scenario, seed, backend.name());

        let quadruped = registry.ids_of_kind(AgentKind::Quadruped).next();
        let arms: Vec<&str> = registry.ids_of_kind(AgentKind::RoboticArm).collect();
        let screens: Vec<&str> = registry.ids_of_kind(AgentKind::Screen).collect();
        let world = WorldState::new(
            quadruped,
            &arms,
            &screens,
            &config.sim,
            &config.fixtures,
            &config.arena_geometry,
        );
        let state = ArenaState {
            tick: 0,
            agent_statuses: registry.initial_statuses(),
            world,
            detections: Vec::new(),
            armed_triggers: Default::default(),
            occupancy: Audience::default(),
        };
        let history_len = config
            .trigger_rules
            .iter()
            .map(|t| t.dwell_ticks as usize)
            .max()
            .unwrap_or(1);

        Ok(Arena {
            config,
            registry,
            scenario,
            backend,
            state,
            rng: SimRng::new(seed),
            journal: Journal::new(header),
            pending: Vec::new(),
            history: VecDeque::with_capacity(history_len),
            history_len,
            robot_sequence: BTreeMap::new(),
            commands: VecDeque::new(),
            last_backend_error: None,
        })
    }

    /// Streams the journal to `path` from now on, starting with the header.
    pub fn journal_to_file(&mut self, path: impl AsRef<Path>) -> Result<(), ArenaError> {
        Ok(self.journal.create_file(path)?)
    }

    pub fn journal_to(&mut self, sink: Box<dyn std::io::Write + Send>) -> Result<(), ArenaError> {
        Ok(self.journal.attach(sink)?)
    }

    /// Queues a command for the next tick boundary after checking it against
    /// the current state. The command is stamped with the current tick.
    pub fn submit(&mut self, mut command: OperatorCommand) -> Result<(), String> {
        command.validate(&self.state, &self.registry)?;
        command.issued_at_tick = self.state.tick;
        self.commands.push_back(command);
        Ok(())
    }

    /// Queues a command exactly as given, skipping validation. Used when
    /// re-injecting journaled commands.
    pub fn submit_unchecked(&mut self, command: OperatorCommand) {
        self.commands.push_back(command);
    }

    pub fn state(&self) -> &ArenaState {
        &self.state
    }

    pub fn tick(&self) -> u64 {
        self.state.tick
    }

    pub fn config(&self) -> &FaithConfig {
        &self.config
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn journal(&self) -> &Journal {
        &self.journal
    }

    pub fn backend_name(&self) -> &str {
        self.backend.name()
    }

    /// The backend failure of the most recent tick, if it had one.
    pub fn last_backend_error(&self) -> Option<&PolicyError> {
        self.last_backend_error.as_ref()
    }

    pub fn rng_cursor(&self) -> u64 {
        self.rng.cursor()
    }
}
