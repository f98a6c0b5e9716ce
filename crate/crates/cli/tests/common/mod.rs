#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use arena_core::FaithConfig;

pub fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

pub fn installation_path() -> PathBuf {
    configs_dir().join("installation.json")
}

pub fn gathering_path() -> PathBuf {
    configs_dir().join("gathering.json")
}

pub fn installation() -> FaithConfig {
    FaithConfig::load(installation_path()).unwrap()
}

pub fn write_config(dir: &Path, name: &str, config: &FaithConfig) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(config).unwrap()).unwrap();
    path
}

pub fn arena(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arena")).args(args).output().unwrap()
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// `arena run` on the sample configuration and gathering scenario.
pub fn run_gathering(journal: &Path, ticks: u64, seed: u64) -> Output {
    arena(&[
        "run",
        "--config",
        path_str(&installation_path()),
        "--scenario",
        path_str(&gathering_path()),
        "--ticks",
        &ticks.to_string(),
        "--seed",
        &seed.to_string(),
        "--backend",
        "scripted",
        "--journal",
        path_str(journal),
    ])
}
