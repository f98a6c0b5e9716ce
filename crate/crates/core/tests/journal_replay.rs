mod common;

use arena_core::journal::{replay, JournalError, JournalHeader, ReplayError};
use arena_core::policy::{BackendError, BackendReply, PolicyBackend, PolicyRequest};
use arena_core::world::GridId;
use arena_core::{Arena, CommandKind, EventPayload, EventRecord, Journal, JournalFile, OperatorCommand, Scenario};
use proptest::prelude::*;

fn record(tick: u64, seq: u32, cursor: u64) -> EventRecord {
    EventRecord {
        tick,
        sequence_in_tick: seq,
        payload: EventPayload::TickAdvanced { scenario: vec![] },
        rng_cursor: cursor,
    }
}

fn header() -> JournalHeader {
    JournalHeader::new(&common::installation(), &Scenario::default(), 7, "scripted")
}

fn scripted_run(ticks: u64) -> String {
    let mut arena = common::scripted_arena(common::installation(), common::gathering(), 7);
    for _ in 0..ticks {
        arena.run_tick().unwrap();
    }
    arena.journal().to_text()
}

#[test]
fn append_to_empty_journal() {
    let mut j = Journal::new(header());
    j.append(record(0, 0, 0)).unwrap();
    assert_eq!(j.len(), 1);
}

#[test]
fn stale_record_is_an_ordering_error() {
    let mut j = Journal::new(header());
    j.append(record(3, 0, 0)).unwrap();
    j.append(record(3, 1, 0)).unwrap();
    for (t, s) in [(3, 1), (3, 0), (2, 9)] {
        assert!(matches!(j.append(record(t, s, 0)), Err(JournalError::Ordering { .. })));
    }
    assert!(matches!(j.append(record(4, 0, 0)), Ok(())));
    j.append(record(5, 0, 10)).unwrap();
    assert!(matches!(j.append(record(6, 0, 9)), Err(JournalError::RngCursor { .. })));
    assert_eq!(j.len(), 4);
}

#[test]
fn file_sink_matches_in_memory_text() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.jsonl");
    let mut arena = common::scripted_arena(common::installation(), common::gathering(), 7);
    arena.journal_to_file(&path).unwrap();
    for _ in 0..20 {
        arena.run_tick().unwrap();
    }
    assert_eq!(std::fs::read_to_string(&path).unwrap(), arena.journal().to_text());
}

#[test]
fn parsed_journal_round_trips_records() {
    let text = scripted_run(60);
    let file = JournalFile::parse(&text).unwrap();
    assert!(file.records.iter().all(Option::is_some));
    let again: Vec<String> = file.events().map(EventRecord::to_line).collect();
    assert_eq!(again, file.lines);
    assert_eq!(file.header.config, common::installation());
}

#[test]
fn zero_tick_replay_has_no_divergence() {
    let file = JournalFile::parse(&scripted_run(0)).unwrap();
    let report = replay(None, &file).unwrap();
    assert!(report.divergence.is_none());
    assert_eq!(report.records_compared, 0);
    assert_eq!(report.final_state.tick, 0);
}

#[test]
fn hundred_tick_scripted_replay_is_identical() {
    let file = JournalFile::parse(&scripted_run(100)).unwrap();
    let report = replay(Some(&common::installation()), &file).unwrap();
    assert_eq!(report.divergence, None);
    assert_eq!(report.records_compared, file.lines.len());
    assert_eq!(report.final_state.tick, 100);
}

#[test]
fn flipped_payload_byte_diverges_at_that_record() {
    let text = scripted_run(30);
    let header_len = text.find('\n').unwrap() + 1;
    let body: Vec<&str> = text[header_len..].lines().collect();
    for index in (0..body.len()).step_by(7) {
        let line = body[index];
        let at = line.find("\"payload\":").unwrap() + "\"payload\":".len() + 2;
        let mut bytes = text.clone().into_bytes();
        let offset = header_len + body[..index].iter().map(|l| l.len() + 1).sum::<usize>() + at;
        bytes[offset] ^= 0x01;
        let tampered = String::from_utf8_lossy(&bytes).into_owned();
        let report = replay(None, &JournalFile::parse(&tampered).unwrap()).unwrap();
        let d = report.divergence.expect("tampering must be reported");
        assert_eq!(d.index, index, "flipped record {index}");
    }
}

#[test]
fn truncated_journal_reports_missing_records() {
    let text = scripted_run(10);
    let mut lines: Vec<&str> = text.lines().collect();
    let last = lines.pop().unwrap();
    let shortened = lines.join("\n") + "\n";
    let file = JournalFile::parse(&shortened).unwrap();
    let d = replay(None, &file).unwrap().divergence.unwrap();
    assert_eq!(d.index, lines.len() - 1);
    assert_eq!(d.expected, None);
    assert_eq!(d.actual.as_deref(), Some(last));
}

#[test]
fn partial_last_line_is_ignored() {
    let text = scripted_run(5);
    let cut = &text[..text.len() - 20];
    let file = JournalFile::parse(cut).unwrap();
    assert_eq!(file.lines.len(), text.lines().count() - 2);
}

#[test]
fn changed_config_is_refused() {
    let file = JournalFile::parse(&scripted_run(3)).unwrap();
    let mut other = common::installation();
    other.macro_text.push('!');
    assert!(matches!(replay(Some(&other), &file), Err(ReplayError::ConfigMismatch { .. })));
}

#[test]
fn operator_commands_are_replayed() {
    let mut arena = common::scripted_arena(common::installation(), Scenario::default(), 3);
    for t in 0..20 {
        if t % 5 == 2 {
            let grid = GridId::new(1 + (t % 12) as i64).unwrap();
            arena
                .submit(OperatorCommand::new(CommandKind::InjectAudience { grid, delta: 2 }))
                .unwrap();
            arena.submit(OperatorCommand::new(CommandKind::Pause)).unwrap();
        }
        arena.run_tick().unwrap();
    }
    let file = JournalFile::parse(&arena.journal().to_text()).unwrap();
    assert_eq!(replay(None, &file).unwrap().divergence, None);
}

/// Stands in for a network model: answers depend on a private counter the
/// replay cannot reproduce, so only the journaled text can drive a replay.
struct Oracle {
    calls: u64,
}

impl PolicyBackend for Oracle {
    fn name(&self) -> &str {
        "llm"
    }
    fn respond(&mut self, request: &PolicyRequest<'_>) -> Result<BackendReply, BackendError> {
        self.calls += 1;
        if self.calls.is_multiple_of(4) {
            return Err(BackendError::Transport {
                attempts: 3,
                message: "timed out".into(),
            });
        }
        let text = if request.decidable_agents.iter().any(|a| a == "quadruped-1") {
            format!(
                "Sure. [{{\"agent\":\"quadruped-1\",\"action\":\"move_to\",\"x\":{},\"y\":2.0}}]",
                1.0 + (self.calls % 4) as f64
            )
        } else if self.calls.is_multiple_of(5) {
            "no idea".to_string()
        } else {
            "[]".to_string()
        };
        Ok(BackendReply { text, rationale: None })
    }
}

#[test]
fn recorded_decisions_replay_without_the_backend() {
    let mut arena = Arena::new(common::installation(), common::gathering(), 9, Box::new(Oracle { calls: 0 })).unwrap();
    for _ in 0..60 {
        arena.run_tick().unwrap();
    }
    let kinds: Vec<_> = arena.journal().records().iter().map(|r| r.kind()).collect();
    assert!(kinds.contains(&"backend_error"));
    assert!(kinds.contains(&"dispatch"));
    let file = JournalFile::parse(&arena.journal().to_text()).unwrap();
    assert_eq!(file.header.backend, "llm");
    assert_eq!(replay(None, &file).unwrap().divergence, None);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn record_lines_round_trip(
        tick in 0u64..1_000_000,
        seq in 0u32..1000,
        cursor in 0u64..u64::MAX,
        grid in 1i64..=12,
        count in 0u32..1000,
        x in -10.0f64..10.0,
        hint in ".{0,40}",
    ) {
        let payloads = vec![
            EventPayload::Detection(arena_core::world::DetectionReport { tick, grid: GridId::new(grid).unwrap(), observed_count: count }),
            EventPayload::TriggerArmed { index: seq as usize, effect_hint: hint.clone() },
            EventPayload::Decision {
                backend: "scripted".into(),
                decidable_agents: vec!["a".into()],
                actions: vec![arena_core::interp::ActionRequest::new("a", arena_core::interp::Action::MoveTo { x, y: -x })],
                rationale: Some(hint.clone()),
                raw_text: hint.clone(),
            },
            EventPayload::BackendError { backend: "llm".into(), error: hint.clone(), raw_text: None },
            EventPayload::Dispatch {
                action: arena_core::interp::ActionRequest::new("light-1", arena_core::interp::Action::AimLight { x, y: x }),
                signal: arena_core::interp::DeviceSignal::Dmx {
                    fixture_id: "light-1".into(),
                    patch: [(1 + (seq % 512) as u16, count as u8)].into(),
                    clamped: x > 0.0,
                },
                frame: None,
            },
        ];
        for payload in payloads {
            let r = EventRecord { tick, sequence_in_tick: seq, payload, rng_cursor: cursor };
            let line = r.to_line();
            prop_assert!(!line.contains('\n'));
            let back = EventRecord::from_line(&line).unwrap();
            prop_assert_eq!(&back, &r);
            prop_assert_eq!(back.to_line(), line);
        }
    }
}

