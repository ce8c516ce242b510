#![allow(dead_code)]

use std::path::PathBuf;

use walkrag::config::Config;
use walkrag::engine::Engine;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/minicity")
}

pub fn fixture_path(name: &str) -> PathBuf {
    fixture_dir().join(name)
}

/// Fixture configuration without environment overrides.
pub fn fixture_config() -> Config {
    let text = std::fs::read_to_string(fixture_path("walkrag.toml")).unwrap();
    let mut config = Config::from_toml_with_env(&text, Vec::new()).unwrap();
    config.resolve_relative(&fixture_dir());
    config
}

pub fn fixture_engine() -> Engine {
    Engine::from_config(fixture_config()).unwrap()
}
