//! Command line entry points and the live gateway.

pub mod driver;
pub mod gateway;

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::Duration;

use arena_core::config::ConfigError;
use arena_core::journal::{replay, ReplayError};
use arena_core::policy::{BackendError, PolicyBackend, PolicyError, ScriptedPolicy};
use arena_core::{Arena, FaithConfig, JournalFile, Scenario};
use clap::{Args, Parser, Subcommand, ValueEnum};

pub use driver::{Driver, DriverHandle, LoopOptions, Snapshot, API_SCHEMA};

/// Exit status of a subcommand.
pub mod exit {
    pub const OK: i32 = 0;
    pub const DIVERGED: i32 = 1;
    pub const FAILED: i32 = 1;
    pub const INVALID: i32 = 2;
    pub const BACKEND_UNREACHABLE: i32 = 3;
}

#[derive(Debug, Parser)]
#[command(name = "arena", version, about = "Run, replay and serve a multi-agent arena")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a headless session for a fixed number of ticks.
    Run(RunArgs),
    /// Re-execute a journal and report the first divergence.
    Replay(ReplayArgs),
    /// Check a configuration and optional scenario.
    Validate(ValidateArgs),
    /// Run the live loop behind the HTTP/WebSocket gateway.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendKind {
    Scripted,
    Llm,
}

#[derive(Debug, Args)]
pub struct SessionArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Defaults to the configured `rng_seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "scripted")]
    pub backend: BackendKind,
    #[arg(long)]
    pub journal: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub session: SessionArgs,
    #[arg(long)]
    pub ticks: u64,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub journal: PathBuf,
    /// Refuse the journal unless it was recorded with this configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub scenario: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub session: SessionArgs,
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub bind: SocketAddr,
    /// Start paused and tick only on request, with no period between ticks.
    #[arg(long)]
    pub manual: bool,
}

/// Runs a parsed command line and returns the process exit status.
pub fn execute(cli: Cli) -> i32 {
    match cli.command {
        Command::Run(args) => run(&args),
        Command::Replay(args) => replay_journal(&args),
        Command::Validate(args) => validate(&args),
        Command::Serve(args) => serve(args),
    }
}

pub fn backend_for(kind: BackendKind, config: &FaithConfig) -> Box<dyn PolicyBackend> {
    match kind {
        BackendKind::Scripted => Box::new(ScriptedPolicy::new(config.policy.scripted.clone())),
        BackendKind::Llm => Box::new(arena_core::policy::LlmPolicy::from_env(config.policy.llm.clone())),
    }
}

fn load_inputs(config: &Path, scenario: Option<&Path>) -> Result<(FaithConfig, Scenario), String> {
    let config = FaithConfig::load(config).map_err(|e| match e {
        ConfigError::Io { .. } => e.to_string(),
        other => format!("invalid config: {other}"),
    })?;
    let scenario = match scenario {
        Some(path) => Scenario::load(path).map_err(|e| format!("invalid scenario: {e}"))?,
        None => Scenario::default(),
    };
    Ok((config, scenario))
}

/// Builds the arena for a session and attaches its journal file, if any.
fn open_session(args: &SessionArgs) -> Result<Arena, String> {
    let (config, scenario) = load_inputs(&args.config, args.scenario.as_deref())?;
    let seed = args.seed.unwrap_or(config.rng_seed);
    let backend = backend_for(args.backend, &config);
    let mut arena = Arena::new(config, scenario, seed, backend).map_err(|e| format!("invalid config: {e}"))?;
    if let Some(path) = &args.journal {
        arena
            .journal_to_file(path)
            .map_err(|e| format!("cannot write journal {}: {e}", path.display()))?;
    }
    Ok(arena)
}

fn run(args: &RunArgs) -> i32 {
    let mut arena = match open_session(&args.session) {
        Ok(arena) => arena,
        Err(message) => {
            eprintln!("error: {message}");
            return exit::INVALID;
        }
    };
    for _ in 0..args.ticks {
        if let Err(e) = arena.run_tick() {
            eprintln!("error: tick {}: {e}", arena.tick());
            return exit::FAILED;
        }
        if let Some(PolicyError::Backend(err @ BackendError::Transport { .. })) = arena.last_backend_error() {
            eprintln!("error: policy backend unreachable at tick {}: {err}", arena.tick() - 1);
            return exit::BACKEND_UNREACHABLE;
        }
    }
    println!("ran {} ticks, {} events", arena.tick(), arena.journal().len());
    exit::OK
}

fn replay_journal(args: &ReplayArgs) -> i32 {
    let file = match JournalFile::read(&args.journal) {
        Ok(file) => file,
        Err(e) => {
            eprintln!("error: cannot read journal {}: {e}", args.journal.display());
            return exit::INVALID;
        }
    };
    let config = match &args.config {
        Some(path) => match FaithConfig::load(path) {
            Ok(config) => Some(config),
            Err(e) => {
                eprintln!("error: {e}");
                return exit::INVALID;
            }
        },
        None => None,
    };
    match replay(config.as_ref(), &file) {
        Ok(report) => match report.divergence {
            None => {
                println!(
                    "replayed {} records over {} ticks, no divergence",
                    report.records_compared, report.final_state.tick
                );
                exit::OK
            }
            Some(d) => {
                println!("{d}");
                exit::DIVERGED
            }
        },
        Err(e @ ReplayError::ConfigMismatch { .. }) => {
            println!("{e}");
            exit::DIVERGED
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit::INVALID
        }
    }
}

fn validate(args: &ValidateArgs) -> i32 {
    match load_inputs(&args.config, args.scenario.as_deref()) {
        Ok((config, scenario)) => {
            println!(
                "ok: {} agents, {} trigger rules, {} fixtures, {} scenario events",
                config.agents.len(),
                config.trigger_rules.len(),
                config.fixtures.len(),
                scenario.events.len()
            );
            exit::OK
        }
        Err(message) => {
            eprintln!("error: {message}");
            exit::INVALID
        }
    }
}

fn serve(args: ServeArgs) -> i32 {
    let arena = match open_session(&args.session) {
        Ok(arena) => arena,
        Err(message) => {
            eprintln!("error: {message}");
            return exit::INVALID;
        }
    };
    let options = if args.manual {
        LoopOptions::manual()
    } else {
        LoopOptions::timed(Duration::from_millis(arena.config().tick_period_ms))
    };
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(rt) => rt,
        Err(e) => {
            eprintln!("error: {e}");
            return exit::FAILED;
        }
    };
    runtime.block_on(async move {
        let server = match gateway::start(arena, options, args.bind).await {
            Ok(server) => server,
            Err(e) => {
                eprintln!("error: cannot bind {}: {e}", args.bind);
                return exit::FAILED;
            }
        };
        println!("serving on http://{}", server.addr());
        let _ = tokio::signal::ctrl_c().await;
        match server.stop().await {
            Ok(arena) => {
                println!("stopped after {} ticks, {} events", arena.tick(), arena.journal().len());
                exit::OK
            }
            Err(e) => {
                eprintln!("error: {e}");
                exit::FAILED
            }
        }
    })
}
