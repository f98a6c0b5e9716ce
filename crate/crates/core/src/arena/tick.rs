use std::collections::BTreeSet;

use super::{decidable_agents, evaluate_drives, evaluate_triggers, assemble_global_prompt, Arena, ArenaError};
use crate::interp::{compile, encode_robot_command, DeviceSignal};
use crate::journal::{EventPayload, EventRecord, RejectionStage};
use crate::operator::CommandKind;
use crate::policy::{decide, PolicyRequest};
use crate::world::{detect_audience, visible_cells, StepContext};

/// Collects one tick's records, stamping sequence numbers and rng cursors.
struct TickLog {
    tick: u64,
    records: Vec<EventRecord>,
}

impl TickLog {
    fn push(&mut self, payload: EventPayload, rng_cursor: u64) {
        self.records.push(EventRecord {
            tick: self.tick,
            sequence_in_tick: self.records.len() as u32,
            payload,
            rng_cursor,
        });
    }
}

impl Arena {
    /// Runs one iteration of the loop and returns its records in journal
    /// order.
    ///
    /// Phases: operator commands and scenario records; world step with the
    /// signals dispatched last tick; status reports and detections; drives;
    /// triggers; one batched policy call; validation and dispatch; journal.
    pub fn run_tick(&mut self) -> Result<Vec<EventRecord>, ArenaError> {
        let tick = self.state.tick;
        let mut log = TickLog {
            tick,
            records: Vec::new(),
        };

        // 0. boundary inputs
        while let Some(cmd) = self.commands.pop_front() {
            self.apply_command(&cmd.kind);
            log.push(EventPayload::OperatorCommand(cmd), self.rng.cursor());
        }
        let scenario: Vec<_> = self.scenario.events_at(tick).copied().collect();
        self.scenario.apply(tick, &mut self.state.world.audience);
        log.push(EventPayload::TickAdvanced { scenario }, self.rng.cursor());

        // 1. world
        let signals = std::mem::take(&mut self.pending);
        let ctx = StepContext {
            tick,
            dt: self.config.tick_seconds(),
            params: &self.config.sim,
            profiles: &self.config.fixtures,
            geometry: &self.config.arena_geometry,
        };
        let (world, completions) = self.state.world.step(&ctx, &signals, &mut self.rng);
        self.state.world = world;

        // 2. feedback
        for c in completions {
            if let Some(status) = self.state.agent_statuses.get_mut(&c.agent_id) {
                status.busy = false;
                status.last_report = c.report.clone();
                status.updated_at_tick = tick;
            }
            log.push(
                EventPayload::StatusReport {
                    agent: c.agent_id,
                    report: c.report,
                },
                self.rng.cursor(),
            );
        }
        self.state.detections.clear();
        if let Some(q) = &self.state.world.quadruped {
            let camera = self.config.sim.camera;
            let geometry = &self.config.arena_geometry;
            for grid in visible_cells(q.pose, camera, geometry) {
                self.state.occupancy.set(grid, 0);
            }
            let reports = detect_audience(q.pose, &self.state.world.audience, camera, geometry, tick);
            for r in &reports {
                self.state.occupancy.set(r.grid, r.observed_count);
                log.push(EventPayload::Detection(r.clone()), self.rng.cursor());
            }
            self.state.detections = reports;
        }
        if self.history.len() == self.history_len {
            self.history.pop_front();
        }
        self.history.push_back(self.state.occupancy.clone());

        // 3. drives
        let modes = evaluate_drives(&self.state, &self.registry)?;
        for (agent, to) in modes {
            let Some(status) = self.state.agent_statuses.get_mut(&agent) else {
                continue;
            };
            if status.mode != to {
                let from = status.mode;
                status.mode = to;
                status.updated_at_tick = tick;
                log.push(EventPayload::DriveChange { agent, from, to }, self.rng.cursor());
            }
        }

        // 4. triggers
        let history: Vec<_> = self.history.iter().cloned().collect();
        let armed = evaluate_triggers(&self.config.trigger_rules, &history);
        let touched: BTreeSet<usize> = armed.symmetric_difference(&self.state.armed_triggers).copied().collect();
        for index in touched {
            let payload = if armed.contains(&index) {
                EventPayload::TriggerArmed {
                    index,
                    effect_hint: self.config.trigger_rules[index].effect_hint.clone(),
                }
            } else {
                EventPayload::TriggerDisarmed { index }
            };
            log.push(payload, self.rng.cursor());
        }
        self.state.armed_triggers = armed;

        // 5. decision
        self.last_backend_error = None;
        let decidable = decidable_agents(&self.state, &self.registry);
        let mut actions = Vec::new();
        if !decidable.is_empty() {
            let prompt = assemble_global_prompt(&self.config, &self.state);
            let request = PolicyRequest {
                prompt: &prompt,
                decidable_agents: &decidable,
                tick,
                state: &self.state,
                registry: &self.registry,
                geometry: &self.config.arena_geometry,
            };
            let backend = self.backend.name().to_string();
            match decide(self.backend.as_mut(), &request) {
                Ok(response) => {
                    log.push(
                        EventPayload::Decision {
                            backend,
                            decidable_agents: decidable.clone(),
                            actions: response.actions.clone(),
                            rationale: response.rationale,
                            raw_text: response.raw_text,
                        },
                        self.rng.cursor(),
                    );
                    for r in response.rejections {
                        log.push(
                            EventPayload::Rejection {
                                agent: r.agent,
                                stage: RejectionStage::Parse,
                                reason: format!("action {}: {}", r.index, r.reason),
                            },
                            self.rng.cursor(),
                        );
                    }
                    actions = response.actions;
                }
                Err(failure) => {
                    log.push(
                        EventPayload::BackendError {
                            backend,
                            error: failure.error.to_string(),
                            raw_text: failure.raw_text,
                        },
                        self.rng.cursor(),
                    );
                    self.last_backend_error = Some(failure.error);
                }
            }
        }

        // 6. dispatch
        let mut dispatched = BTreeSet::new();
        for action in actions {
            let agent = action.agent_id.clone();
            let refusal = if !decidable.contains(&agent) {
                Some(format!("agent {agent} is busy"))
            } else if dispatched.contains(&agent) {
                Some(format!("agent {agent} already received an action this tick"))
            } else {
                None
            };
            if let Some(reason) = refusal {
                log.push(
                    EventPayload::Rejection {
                        agent,
                        stage: RejectionStage::Dispatch,
                        reason,
                    },
                    self.rng.cursor(),
                );
                continue;
            }
            let seq = self.robot_sequence.get(&agent).copied().unwrap_or(0).wrapping_add(1);
            match compile(&action, &self.config.fixtures, seq) {
                Ok(signal) => {
                    let frame = match &signal {
                        DeviceSignal::Robot(cmd) => {
                            self.robot_sequence.insert(agent.clone(), seq);
                            Some(hex::encode(encode_robot_command(cmd)))
                        }
                        _ => None,
                    };
                    if let Some(status) = self.state.agent_statuses.get_mut(&agent) {
                        status.busy = true;
                        status.last_action = Some(action.clone());
                        status.updated_at_tick = tick;
                    }
                    dispatched.insert(agent);
                    self.pending.push(signal.clone());
                    log.push(EventPayload::Dispatch { action, signal, frame }, self.rng.cursor());
                }
                Err(e) => log.push(
                    EventPayload::Rejection {
                        agent,
                        stage: RejectionStage::Dispatch,
                        reason: e.to_string(),
                    },
                    self.rng.cursor(),
                ),
            }
        }

        // 7. journal
        for r in &log.records {
            self.journal.append(r.clone())?;
        }
        self.state.tick += 1;
        Ok(log.records)
    }

    fn apply_command(&mut self, kind: &CommandKind) {
        match kind {
            CommandKind::InjectAudience { grid, delta } => {
                self.state.world.audience.add_saturating(*grid, *delta);
            }
            CommandKind::SetDriveMode { agent_id, mode } => {
                if let Some(status) = self.state.agent_statuses.get_mut(agent_id) {
                    status.mode = *mode;
                    status.updated_at_tick = self.state.tick;
                }
            }
            CommandKind::UpdateMacroText { text } => self.config.macro_text = text.clone(),
            // loop control belongs to whoever drives the ticks
            CommandKind::Pause | CommandKind::Resume | CommandKind::StepOnce => {}
        }
    }
}
