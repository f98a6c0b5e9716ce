#![allow(dead_code)]

use std::path::PathBuf;

use arena_core::policy::ScriptedPolicy;
use arena_core::{Arena, FaithConfig, Scenario};

pub fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

pub fn installation() -> FaithConfig {
    FaithConfig::load(configs_dir().join("installation.json")).unwrap()
}

pub fn gathering() -> Scenario {
    Scenario::load(configs_dir().join("gathering.json")).unwrap()
}

pub fn scripted_arena(config: FaithConfig, scenario: Scenario, seed: u64) -> Arena {
    let backend = ScriptedPolicy::new(config.policy.scripted.clone());
    Arena::new(config, scenario, seed, Box::new(backend)).unwrap()
}
