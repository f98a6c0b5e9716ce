//! Orchestration engine for a multi-agent robotic installation.
//!
//! A fixed-period tick loop reads a simulated world (quadruped scout with a
//! camera, robotic arms moving a tree, moving-head lights, fog, screens and an
//! audience in twelve exterior cells), evaluates per-agent drives and
//! audience triggers, asks a policy backend for discrete actions, compiles
//! them to device signals (DMX512 patches, robot command frames) and journals
//! every event so any run can be replayed byte for byte.

pub mod arena;
pub mod condition;
pub mod config;
pub mod interp;
pub mod journal;
pub mod operator;
pub mod policy;
pub mod world;

pub use arena::{Arena, ArenaError, ArenaState};
pub use config::FaithConfig;
pub use journal::{EventPayload, EventRecord, Journal, JournalFile};
pub use operator::{CommandKind, OperatorCommand};
pub use world::Scenario;
