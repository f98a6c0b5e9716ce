//! The loop thread: sole owner of the [`Arena`], ticking it on a timer or on
//! request and publishing snapshots and event lines to the gateway.

use std::sync::mpsc::{self, RecvTimeoutError};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use arena_core::{Arena, ArenaError, ArenaState, CommandKind, OperatorCommand};
use serde::Serialize;
use tokio::sync::{broadcast, oneshot, watch};

pub const API_SCHEMA: &str = "arena-api/1";

const FEED_CAPACITY: usize = 4096;

/// How ticks are paced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoopOptions {
    pub period: Duration,
    pub start_paused: bool,
}

impl LoopOptions {
    pub fn timed(period: Duration) -> Self {
        LoopOptions {
            period,
            start_paused: false,
        }
    }

    /// Timing-free: starts paused, so ticks happen only on `step_once`, and
    /// runs back to back once resumed.
    pub fn manual() -> Self {
        LoopOptions {
            period: Duration::ZERO,
            start_paused: true,
        }
    }
}

/// Immutable view of the arena between ticks.
#[derive(Debug, Clone, Serialize)]
pub struct Snapshot {
    pub schema: &'static str,
    pub paused: bool,
    pub state: ArenaState,
}

/// Every journal line published so far, plus a channel for the ones to come.
#[derive(Debug)]
pub struct EventFeed {
    inner: Mutex<FeedInner>,
}

#[derive(Debug)]
struct FeedInner {
    lines: Vec<Arc<str>>,
    /// Dropped when the loop stops, which ends every subscription.
    tx: Option<broadcast::Sender<Arc<str>>>,
}

impl EventFeed {
    fn new() -> Self {
        EventFeed {
            inner: Mutex::new(FeedInner {
                lines: Vec::new(),
                tx: Some(broadcast::channel(FEED_CAPACITY).0),
            }),
        }
    }

    fn publish(&self, line: String) {
        let mut inner = self.inner.lock().expect("feed lock");
        let line: Arc<str> = line.into();
        inner.lines.push(line.clone());
        if let Some(tx) = &inner.tx {
            let _ = tx.send(line);
        }
    }

    fn close(&self) {
        self.inner.lock().expect("feed lock").tx = None;
    }

    /// Lines from index `since` on, and a receiver for everything after them.
    /// Both are taken under one lock so nothing falls between.
    pub fn subscribe(&self, since: usize) -> (Vec<Arc<str>>, broadcast::Receiver<Arc<str>>) {
        let inner = self.inner.lock().expect("feed lock");
        let backlog = inner.lines.get(since..).map(<[_]>::to_vec).unwrap_or_default();
        let rx = match &inner.tx {
            Some(tx) => tx.subscribe(),
            None => broadcast::channel(1).1,
        };
        (backlog, rx)
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("feed lock").lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

enum Request {
    Command(OperatorCommand, oneshot::Sender<Result<u64, String>>),
    Shutdown,
}

/// Why the loop refused or could not take a command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubmitError {
    Rejected(String),
    Stopped,
}

/// Cloneable access to a running loop.
#[derive(Debug, Clone)]
pub struct DriverHandle {
    requests: mpsc::Sender<Request>,
    snapshot: watch::Receiver<Arc<Snapshot>>,
    feed: Arc<EventFeed>,
}

impl DriverHandle {
    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.snapshot.borrow().clone()
    }

    pub fn watch(&self) -> watch::Receiver<Arc<Snapshot>> {
        self.snapshot.clone()
    }

    pub fn feed(&self) -> &EventFeed {
        &self.feed
    }

    /// Queues a command for the next tick boundary. Returns the tick it will
    /// be journaled in.
    pub async fn submit(&self, command: OperatorCommand) -> Result<u64, SubmitError> {
        let (tx, rx) = oneshot::channel();
        self.requests
            .send(Request::Command(command, tx))
            .map_err(|_| SubmitError::Stopped)?;
        match rx.await {
            Ok(Ok(tick)) => Ok(tick),
            Ok(Err(reason)) => Err(SubmitError::Rejected(reason)),
            Err(_) => Err(SubmitError::Stopped),
        }
    }
}

/// A running loop thread.
pub struct Driver {
    handle: DriverHandle,
    thread: JoinHandle<Result<Arena, ArenaError>>,
}

impl Driver {
    pub fn spawn(arena: Arena, options: LoopOptions) -> Driver {
        let (requests, rx) = mpsc::channel();
        let snapshot = watch::channel(Arc::new(Snapshot {
            schema: API_SCHEMA,
            paused: options.start_paused,
            state: arena.state().clone(),
        }));
        let feed = Arc::new(EventFeed::new());
        let mut worker = Worker {
            arena,
            options,
            paused: options.start_paused,
            snapshot: snapshot.0,
            feed: feed.clone(),
        };
        let thread = thread::Builder::new()
            .name("arena-loop".into())
            .spawn(move || {
                let outcome = worker.run(rx);
                worker.feed.close();
                outcome.map(|()| worker.arena)
            })
            .expect("spawn loop thread");
        Driver {
            handle: DriverHandle {
                requests,
                snapshot: snapshot.1,
                feed,
            },
            thread,
        }
    }

    pub fn handle(&self) -> DriverHandle {
        self.handle.clone()
    }

    /// Stops the loop at the next tick boundary and hands back the arena.
    pub fn shutdown(self) -> Result<Arena, ArenaError> {
        let _ = self.handle.requests.send(Request::Shutdown);
        self.thread.join().expect("loop thread panicked")
    }
}

struct Worker {
    arena: Arena,
    options: LoopOptions,
    paused: bool,
    snapshot: watch::Sender<Arc<Snapshot>>,
    feed: Arc<EventFeed>,
}

impl Worker {
    fn run(&mut self, rx: mpsc::Receiver<Request>) -> Result<(), ArenaError> {
        let mut due = Instant::now() + self.options.period;
        loop {
            let request = if self.paused {
                match rx.recv() {
                    Ok(r) => Some(r),
                    Err(_) => return Ok(()),
                }
            } else {
                match rx.recv_timeout(due.saturating_duration_since(Instant::now())) {
                    Ok(r) => Some(r),
                    Err(RecvTimeoutError::Timeout) => None,
                    Err(RecvTimeoutError::Disconnected) => return Ok(()),
                }
            };
            match request {
                None => {
                    self.tick()?;
                    let now = Instant::now();
                    due = (due + self.options.period).max(now);
                }
                Some(Request::Shutdown) => return Ok(()),
                Some(Request::Command(command, reply)) => {
                    let kind = command.kind.clone();
                    if let Err(reason) = self.arena.submit(command) {
                        let _ = reply.send(Err(reason));
                        continue;
                    }
                    let applies_at = self.arena.tick();
                    match kind {
                        CommandKind::Pause => self.paused = true,
                        CommandKind::Resume if self.paused => {
                            self.paused = false;
                            due = Instant::now() + self.options.period;
                        }
                        CommandKind::StepOnce if self.paused => self.tick()?,
                        _ => {}
                    }
                    self.publish_snapshot();
                    let _ = reply.send(Ok(applies_at));
                }
            }
        }
    }

    fn tick(&mut self) -> Result<(), ArenaError> {
        let records = self.arena.run_tick()?;
        for record in &records {
            self.feed.publish(record.to_line());
        }
        self.publish_snapshot();
        Ok(())
    }

    fn publish_snapshot(&self) {
        self.snapshot.send_replace(Arc::new(Snapshot {
            schema: API_SCHEMA,
            paused: self.paused,
            state: self.arena.state().clone(),
        }));
    }
}
