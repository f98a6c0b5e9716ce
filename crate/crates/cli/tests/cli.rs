mod common;

use std::net::TcpListener;

use arena_core::{EventPayload, JournalFile};
use arena_core::interp::{Action, DeviceSignal};
use common::{arena, path_str, run_gathering, stderr, stdout};

#[test]
fn zero_ticks_writes_only_the_header() {
    let dir = tempfile::tempdir().unwrap();
    let journal = dir.path().join("j.jsonl");
    let out = run_gathering(&journal, 0, 7);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "ran 0 ticks, 0 events");
    let text = std::fs::read_to_string(&journal).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(JournalFile::parse(&text).unwrap().lines.is_empty());
}

#[test]
fn gathering_run_arms_then_shifts_light_and_fog() {
    let dir = tempfile::tempdir().unwrap();
    let journal = dir.path().join("j.jsonl");
    let out = run_gathering(&journal, 12, 7);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let file = JournalFile::read(&journal).unwrap();
    assert_eq!(stdout(&out).trim(), format!("ran 12 ticks, {} events", file.lines.len()));

    let armed = file
        .events()
        .find(|r| r.kind() == "trigger_armed")
        .expect("trigger armed")
        .tick;
    let shifts: Vec<u64> = file
        .events()
        .filter_map(|r| match &r.payload {
            EventPayload::Dispatch { action, signal, .. }
                if matches!(action.action, Action::AimLight { .. } | Action::SetFog { .. }) =>
            {
                assert!(matches!(signal, DeviceSignal::Dmx { .. }));
                Some(r.tick)
            }
            _ => None,
        })
        .collect();
    assert!(shifts.iter().any(|&t| t >= armed && t <= armed + 2), "armed {armed}, shifts {shifts:?}");
}

#[test]
fn malformed_config_exits_2_without_a_journal_body() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    std::fs::write(&config, r#"{"macro_text": "m", "agents": [{"id": "a"}"#).unwrap();
    let journal = dir.path().join("j.jsonl");
    let out = arena(&["run", "--config", path_str(&config), "--ticks", "5", "--journal", path_str(&journal)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("invalid config"), "{}", stderr(&out));
    let body = std::fs::read_to_string(&journal).unwrap_or_default();
    assert!(body.lines().count() <= 1);
}

#[test]
fn invalid_but_wellformed_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = common::installation();
    config.agents.push(config.agents[0].clone());
    let path = common::write_config(dir.path(), "dup.json", &config);
    let out = arena(&["validate", "--config", path_str(&path)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("quadruped-1"), "{}", stderr(&out));
}

#[test]
fn sample_configuration_validates() {
    let out = arena(&[
        "validate",
        "--config",
        path_str(&common::installation_path()),
        "--scenario",
        path_str(&common::gathering_path()),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).starts_with("ok: 6 agents, 1 trigger rules"));
}

#[test]
fn scenario_with_unknown_cell_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("s.json");
    std::fs::write(&scenario, r#"[{"tick": 1, "grid": 13, "delta": 1}]"#).unwrap();
    let out = arena(&[
        "validate",
        "--config",
        path_str(&common::installation_path()),
        "--scenario",
        path_str(&scenario),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn replay_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let journal = dir.path().join("j.jsonl");
    assert_eq!(run_gathering(&journal, 30, 7).status.code(), Some(0));

    let out = arena(&["replay", "--journal", path_str(&journal)]);
    assert_eq!(out.status.code(), Some(0), "{}{}", stdout(&out), stderr(&out));
    assert!(stdout(&out).contains("no divergence"));

    let text = std::fs::read_to_string(&journal).unwrap();
    let tampered = text.replacen("\"observed_count\":2", "\"observed_count\":3", 1);
    assert_ne!(tampered, text);
    let bad = dir.path().join("tampered.jsonl");
    std::fs::write(&bad, tampered).unwrap();
    let out = arena(&["replay", "--journal", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("divergence at record"), "{}", stdout(&out));

    let out = arena(&["replay", "--journal", path_str(&dir.path().join("missing.jsonl"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn replay_against_a_different_config_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let journal = dir.path().join("j.jsonl");
    assert_eq!(run_gathering(&journal, 3, 7).status.code(), Some(0));
    let mut other = common::installation();
    other.system_goal.push_str(" quietly");
    let path = common::write_config(dir.path(), "other.json", &other);
    let out = arena(&["replay", "--journal", path_str(&journal), "--config", path_str(&path)]);
    assert_eq!(out.status.code(), Some(1));
    let out = arena(&[
        "replay",
        "--journal",
        path_str(&journal),
        "--config",
        path_str(&common::installation_path()),
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn unreachable_model_endpoint_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let mut config = common::installation();
    config.policy.llm.base_url = format!("http://127.0.0.1:{port}/v1");
    config.policy.llm.retries = 1;
    config.policy.llm.timeout_ms = 2_000;
    let path = common::write_config(dir.path(), "llm.json", &config);
    let journal = dir.path().join("j.jsonl");
    let out = arena(&[
        "run",
        "--config",
        path_str(&path),
        "--ticks",
        "5",
        "--backend",
        "llm",
        "--journal",
        path_str(&journal),
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("2 attempt(s)"), "{}", stderr(&out));
    let file = JournalFile::read(&journal).unwrap();
    assert_eq!(file.events().last().unwrap().kind(), "backend_error");
}

#[test]
fn serve_reports_a_taken_port() {
    let taken = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = taken.local_addr().unwrap().to_string();
    let out = arena(&["serve", "--config", path_str(&common::installation_path()), "--bind", &addr]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("cannot bind"), "{}", stderr(&out));
}
