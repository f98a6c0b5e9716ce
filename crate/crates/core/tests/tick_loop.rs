mod common;

use arena_core::config::{AgentDescriptor, AgentKind};
use arena_core::interp::{Action, ActionRequest};
use arena_core::policy::{BackendError, BackendReply, PolicyBackend, PolicyRequest};
use arena_core::world::{GridId, Pose};
use arena_core::{Arena, CommandKind, EventPayload, FaithConfig, OperatorCommand, Scenario};

struct Failing;

impl PolicyBackend for Failing {
    fn name(&self) -> &str {
        "failing"
    }
    fn respond(&mut self, _: &PolicyRequest<'_>) -> Result<BackendReply, BackendError> {
        Err(BackendError::Transport {
            attempts: 3,
            message: "connection refused".into(),
        })
    }
}

/// Answers with a fixed text every tick.
struct Canned(String);

impl PolicyBackend for Canned {
    fn name(&self) -> &str {
        "canned"
    }
    fn respond(&mut self, _: &PolicyRequest<'_>) -> Result<BackendReply, BackendError> {
        Ok(BackendReply {
            text: self.0.clone(),
            rationale: None,
        })
    }
}

fn bare_config() -> FaithConfig {
    FaithConfig::from_json(r#"{"macro_text":"stay","agents":[]}"#).unwrap()
}

fn kinds(records: &[arena_core::EventRecord]) -> Vec<&'static str> {
    records.iter().map(|r| r.kind()).collect()
}

#[test]
fn empty_system_emits_only_tick_advanced() {
    let mut arena = common::scripted_arena(bare_config(), Scenario::default(), 0);
    for t in 0..5 {
        let records = arena.run_tick().unwrap();
        assert_eq!(kinds(&records), vec!["tick_advanced"]);
        assert_eq!(records[0].tick, t);
    }
    assert_eq!(arena.tick(), 5);
}

#[test]
fn failing_backend_keeps_the_loop_alive() {
    let config = common::installation();
    let mut arena = Arena::new(config, common::gathering(), 1, Box::new(Failing)).unwrap();
    for t in 0..100u64 {
        let records = arena.run_tick().unwrap();
        let errors = records.iter().filter(|r| r.kind() == "backend_error").count();
        assert_eq!(errors, 1, "tick {t}");
        assert!(records.iter().all(|r| r.kind() != "dispatch"));
    }
    assert_eq!(arena.tick(), 100);
    assert!(arena.last_backend_error().is_some());
}

#[test]
fn gathering_arms_trigger_and_answers_in_the_same_tick() {
    let mut arena = common::scripted_arena(common::installation(), common::gathering(), 7);
    for _ in 0..12 {
        arena.run_tick().unwrap();
    }
    let records = arena.journal().records();
    let armed = records.iter().find(|r| r.kind() == "trigger_armed").unwrap();
    // people appear at tick 2 and the scout sees them from its first leg,
    // so the third consecutive tick with two or more people is tick 4
    assert_eq!(armed.tick, 4);
    let responses: Vec<_> = records
        .iter()
        .filter(|r| r.tick == 4)
        .filter_map(|r| match &r.payload {
            EventPayload::Dispatch { action, .. } => Some(action.clone()),
            _ => None,
        })
        .collect();
    assert!(responses.contains(&ActionRequest::new("light-1", Action::AimLight { x: 2.25, y: 6.75 })));
    assert!(responses.iter().any(|a| a.agent_id == "fog-1"));
    let aim = records
        .iter()
        .find_map(|r| match &r.payload {
            EventPayload::Dispatch { signal, action, .. } if action.agent_id == "light-1" => Some(signal.clone()),
            _ => None,
        })
        .unwrap();
    let json = serde_json::to_value(aim).unwrap();
    assert_eq!(json["patch"], serde_json::json!({"1": 48, "2": 7, "3": 49, "4": 50, "5": 255}));
}

#[test]
fn ticks_are_consecutive_and_dispatches_follow_decisions() {
    let mut arena = common::scripted_arena(common::installation(), common::gathering(), 7);
    for _ in 0..100 {
        arena.run_tick().unwrap();
    }
    let records = arena.journal().records();
    let mut expected_tick = 0;
    let mut seen_decision = false;
    let mut last_cursor = 0;
    for (i, r) in records.iter().enumerate() {
        if r.sequence_in_tick == 0 {
            if i > 0 {
                expected_tick += 1;
            }
            seen_decision = false;
        }
        assert_eq!(r.tick, expected_tick);
        assert!(r.rng_cursor >= last_cursor);
        last_cursor = r.rng_cursor;
        match r.kind() {
            "decision" => seen_decision = true,
            "dispatch" => assert!(seen_decision, "dispatch without decision at record {i}"),
            _ => {}
        }
    }
    assert_eq!(expected_tick, 99);
}

#[test]
fn busy_agents_are_not_decidable() {
    let mut arena = common::scripted_arena(common::installation(), Scenario::default(), 7);
    arena.run_tick().unwrap();
    assert!(arena.state().is_busy("quadruped-1"));
    let records = arena.run_tick().unwrap();
    let decision = records
        .iter()
        .find_map(|r| match &r.payload {
            EventPayload::Decision { decidable_agents, .. } => Some(decidable_agents.clone()),
            _ => None,
        })
        .unwrap();
    assert!(!decision.contains(&"quadruped-1".to_string()));
}

#[test]
fn invalid_and_duplicate_actions_are_rejected_individually() {
    let text = r#"[
        {"agent":"quadruped-1","action":"move_to","x":2,"y":2},
        {"agent":"quadruped-1","action":"move_to","x":4,"y":4},
        {"agent":"ghost","action":"move_to","x":1,"y":1},
        {"agent":"fog-1","action":"set_fog","state":"on"}
    ]"#;
    let mut arena = Arena::new(common::installation(), Scenario::default(), 0, Box::new(Canned(text.into()))).unwrap();
    let records = arena.run_tick().unwrap();
    let k = kinds(&records);
    assert_eq!(k.iter().filter(|k| **k == "dispatch").count(), 2);
    assert_eq!(k.iter().filter(|k| **k == "rejection").count(), 2);
    let reasons: Vec<String> = records
        .iter()
        .filter_map(|r| match &r.payload {
            EventPayload::Rejection { reason, .. } => Some(reason.clone()),
            _ => None,
        })
        .collect();
    assert!(reasons[0].contains("ghost"));
    assert!(reasons[1].contains("already"));
}

#[test]
fn unparsable_reply_is_a_backend_error_with_raw_text() {
    let mut arena = Arena::new(
        common::installation(),
        Scenario::default(),
        0,
        Box::new(Canned("I would rather not.".into())),
    )
    .unwrap();
    let records = arena.run_tick().unwrap();
    let err = records.iter().find(|r| r.kind() == "backend_error").unwrap();
    match &err.payload {
        EventPayload::BackendError { raw_text, error, .. } => {
            assert_eq!(raw_text.as_deref(), Some("I would rather not."));
            assert!(error.contains("empty decision"));
        }
        _ => unreachable!(),
    }
}

fn scout_facing_cell_5() -> FaithConfig {
    let mut config = common::installation();
    // cell 5's centroid is (6.75, 3.75): due east of this pose
    config.sim.quadruped_start = Pose {
        x: 3.0,
        y: 3.75,
        heading: 0.0,
    };
    config.policy.scripted.clear();
    config
}

#[test]
fn injected_audience_is_detected_next_tick() {
    let mut arena = common::scripted_arena(scout_facing_cell_5(), Scenario::default(), 0);
    arena.run_tick().unwrap();
    let grid = GridId::new(5).unwrap();
    arena
        .submit(OperatorCommand::new(CommandKind::InjectAudience { grid, delta: 2 }))
        .unwrap();
    let records = arena.run_tick().unwrap();
    assert_eq!(&kinds(&records)[..2], &["operator_command", "tick_advanced"]);
    match &records[0].payload {
        EventPayload::OperatorCommand(c) => assert_eq!(c.issued_at_tick, 1),
        _ => unreachable!(),
    }
    let detected: Vec<_> = records
        .iter()
        .filter_map(|r| match &r.payload {
            EventPayload::Detection(d) => Some((d.grid.get(), d.observed_count)),
            _ => None,
        })
        .collect();
    assert_eq!(detected, vec![(5, 2)]);
    assert_eq!(arena.state().occupancy.get(grid), 2);
}

#[test]
fn invalid_commands_are_refused_without_touching_the_queue() {
    let mut arena = common::scripted_arena(common::installation(), Scenario::default(), 0);
    let grid = GridId::new(3).unwrap();
    assert!(arena
        .submit(OperatorCommand::new(CommandKind::InjectAudience { grid, delta: -1 }))
        .is_err());
    assert!(arena
        .submit(OperatorCommand::new(CommandKind::SetDriveMode {
            agent_id: "ghost".into(),
            mode: arena_core::arena::DriveMode::Protective,
        }))
        .is_err());
    let records = arena.run_tick().unwrap();
    assert!(records.iter().all(|r| r.kind() != "operator_command"));
}

#[test]
fn drive_mode_override_and_macro_update_apply_at_the_boundary() {
    let mut config = bare_config();
    config.agents.push(AgentDescriptor {
        id: "screen-1".into(),
        kind: AgentKind::Screen,
        purpose: "show".into(),
        drive_rules: vec![],
        capabilities: None,
    });
    let mut arena = common::scripted_arena(config, Scenario::default(), 0);
    arena
        .submit(OperatorCommand::new(CommandKind::SetDriveMode {
            agent_id: "screen-1".into(),
            mode: arena_core::arena::DriveMode::Performing,
        }))
        .unwrap();
    arena
        .submit(OperatorCommand::new(CommandKind::UpdateMacroText { text: "burn bright".into() }))
        .unwrap();
    assert_eq!(arena.state().agent_statuses["screen-1"].mode, arena_core::arena::DriveMode::Idle);
    arena.run_tick().unwrap();
    assert_eq!(
        arena.state().agent_statuses["screen-1"].mode,
        arena_core::arena::DriveMode::Performing
    );
    assert_eq!(arena.config().macro_text, "burn bright");
}

#[test]
fn same_inputs_give_identical_journals() {
    let run = |seed| {
        let mut config = common::installation();
        config.sim.audience_model.arrival_prob = 0.05;
        config.sim.audience_model.departure_prob = 0.1;
        let mut arena = common::scripted_arena(config, common::gathering(), seed);
        for _ in 0..100 {
            arena.run_tick().unwrap();
        }
        arena.journal().to_text()
    };
    assert_eq!(run(11), run(11));
    assert_ne!(run(11), run(12));
}
