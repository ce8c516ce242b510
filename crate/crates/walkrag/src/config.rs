//! Service configuration: TOML file, `WALKRAG_*` environment overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use walkrag_core::walkability::{IndicatorWeights, WEIGHT_SUM_TOLERANCE};

pub const ENV_PREFIX: &str = "WALKRAG_";
/// `WALKRAG_*` variables that are not settings: the config path and log filter.
const RESERVED_ENV: &[&str] = &["CONFIG", "LOG"];

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid value for {key}: {reason}")]
    Invalid { key: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncoderKind {
    Hashing,
    Http,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LlmKind {
    Mock,
    Http,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AirQualityKind {
    None,
    Fixture,
    Openweathermap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    Rules,
    Llm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexModeKind {
    Exact,
    Approximate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub map_path: Option<PathBuf>,
    pub gazetteer_path: Option<PathBuf>,
    pub corpus_path: Option<PathBuf>,
    /// Prebuilt index; built from the corpus at startup when absent.
    pub index_path: Option<PathBuf>,
    pub index_mode: IndexModeKind,
    pub session_dir: Option<PathBuf>,
    pub listen: String,

    pub alternatives: usize,
    pub penalty_factor: f64,
    pub max_snap_m: f64,
    pub top_k: usize,
    pub tau: f64,
    pub weight_sidewalk: f64,
    pub weight_pollution: f64,
    pub weight_green_area: f64,
    pub weight_accessibility: f64,
    pub indicator_buffer_m: f64,
    pub poi_buffer_m: f64,

    pub air_quality: AirQualityKind,
    pub air_quality_path: Option<PathBuf>,
    pub air_quality_url: String,
    pub air_quality_api_key: Option<String>,

    pub encoder: EncoderKind,
    pub encoder_dim: usize,
    pub encoder_url: Option<String>,
    pub encoder_model: String,

    pub llm: LlmKind,
    pub llm_url: Option<String>,
    pub llm_model: String,
    pub llm_api_key: Option<String>,
    pub timeout_s: u64,
    pub classifier: ClassifierKind,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            map_path: None,
            gazetteer_path: None,
            corpus_path: None,
            index_path: None,
            index_mode: IndexModeKind::Exact,
            session_dir: None,
            listen: "127.0.0.1:8080".into(),
            alternatives: 3,
            penalty_factor: 1.4,
            max_snap_m: 500.0,
            top_k: 3,
            tau: 5.0,
            weight_sidewalk: 0.25,
            weight_pollution: 0.25,
            weight_green_area: 0.25,
            weight_accessibility: 0.25,
            indicator_buffer_m: 100.0,
            poi_buffer_m: 200.0,
            air_quality: AirQualityKind::None,
            air_quality_path: None,
            air_quality_url: "https://api.openweathermap.org/data/2.5/air_pollution".into(),
            air_quality_api_key: None,
            encoder: EncoderKind::Hashing,
            encoder_dim: 256,
            encoder_url: None,
            encoder_model: "text-embedding".into(),
            llm: LlmKind::Mock,
            llm_url: None,
            llm_model: "gpt-4o-mini".into(),
            llm_api_key: None,
            timeout_s: 30,
            classifier: ClassifierKind::Rules,
        }
    }
}

fn invalid(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key: key.into(), reason: reason.into() }
}

/// An override value is read as a TOML literal when it parses as one
/// (numbers, booleans, quoted strings), otherwise as a bare string.
fn env_value(raw: &str) -> toml::Value {
    match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.into())),
        Err(_) => toml::Value::String(raw.into()),
    }
}

impl Config {
    /// Parses `text`, then applies overrides from `env` (name, value) pairs.
    pub fn from_toml_with_env<I>(text: &str, env: I) -> Result<Self, ConfigError>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let mut table: toml::Table = text.parse()?;
        let known = toml::Table::try_from(Config::default()).expect("defaults serialize");
        for (name, raw) in env {
            let Some(key) = name.strip_prefix(ENV_PREFIX).filter(|k| !RESERVED_ENV.contains(k)) else { continue };
            // Unknown keys are rejected by `deny_unknown_fields` below.
            let key = key.to_ascii_lowercase();
            let value = match known.get(&key) {
                Some(toml::Value::String(_)) => toml::Value::String(raw),
                _ if key.ends_with("_path")
                    || key.ends_with("_dir")
                    || key.ends_with("_url")
                    || key.ends_with("_key") =>
                {
                    toml::Value::String(raw)
                }
                _ => env_value(&raw),
            };
            table.insert(key, value);
        }
        let config: Config = table.try_into()?;
        config.validate()?;
        Ok(config)
    }

    /// Loads `path` (when given) plus the process environment. Relative
    /// paths in the file resolve against the file's directory.
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p).map_err(|source| ConfigError::Io { path: p.into(), source })?,
            None => String::new(),
        };
        let mut config = Self::from_toml_with_env(&text, std::env::vars())?;
        if let Some(dir) = path.and_then(Path::parent) {
            config.resolve_relative(dir);
        }
        Ok(config)
    }

    pub fn resolve_relative(&mut self, base: &Path) {
        for p in [
            &mut self.map_path,
            &mut self.gazetteer_path,
            &mut self.corpus_path,
            &mut self.index_path,
            &mut self.session_dir,
            &mut self.air_quality_path,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }

    pub fn weights(&self) -> Result<IndicatorWeights, ConfigError> {
        IndicatorWeights::new([
            self.weight_sidewalk,
            self.weight_pollution,
            self.weight_green_area,
            self.weight_accessibility,
        ])
        .map_err(|e| invalid("weight_*", e.to_string()))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let weights = [self.weight_sidewalk, self.weight_pollution, self.weight_green_area, self.weight_accessibility];
        if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite()))
            || (weights.iter().sum::<f64>() - 1.0).abs() > WEIGHT_SUM_TOLERANCE
        {
            return Err(invalid("weight_*", "weights must be non-negative and sum to 1"));
        }
        let positive = [
            ("tau", self.tau),
            ("penalty_factor", self.penalty_factor - 1.0),
            ("max_snap_m", self.max_snap_m),
            ("indicator_buffer_m", self.indicator_buffer_m),
            ("poi_buffer_m", self.poi_buffer_m),
        ];
        for (key, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(key, "must be positive (penalty_factor must exceed 1)"));
            }
        }
        for (key, v) in [("alternatives", self.alternatives), ("top_k", self.top_k), ("encoder_dim", self.encoder_dim)]
        {
            if v == 0 {
                return Err(invalid(key, "must be at least 1"));
            }
        }
        if self.encoder == EncoderKind::Http && self.encoder_url.is_none() {
            return Err(invalid("encoder_url", "required when encoder = \"http\""));
        }
        if self.llm == LlmKind::Http && self.llm_url.is_none() {
            return Err(invalid("llm_url", "required when llm = \"http\""));
        }
        match self.air_quality {
            AirQualityKind::Fixture if self.air_quality_path.is_none() => {
                Err(invalid("air_quality_path", "required when air_quality = \"fixture\""))
            }
            AirQualityKind::Openweathermap if self.air_quality_api_key.is_none() => {
                Err(invalid("air_quality_api_key", "required when air_quality = \"openweathermap\""))
            }
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn defaults_are_valid() {
        let c = Config::from_toml_with_env("", env(&[])).unwrap();
        assert_eq!(c, Config::default());
        assert_eq!(c.weights().unwrap(), IndicatorWeights::uniform());
    }

    #[test]
    fn file_then_env() {
        let c = Config::from_toml_with_env(
            "tau = 4.0\nllm = \"mock\"\nmap_path = \"m.osm\"\n",
            env(&[
                ("WALKRAG_TOP_K", "5"),
                ("WALKRAG_LISTEN", "0.0.0.0:9000"),
                ("WALKRAG_MAP_PATH", "/x.osm"),
                ("OTHER", "1"),
            ]),
        )
        .unwrap();
        assert_eq!(c.tau, 4.0);
        assert_eq!(c.top_k, 5);
        assert_eq!(c.listen, "0.0.0.0:9000");
        assert_eq!(c.map_path, Some(PathBuf::from("/x.osm")));
    }

    #[test]
    fn rejects_bad_values() {
        assert!(Config::from_toml_with_env("weight_sidewalk = 0.5", env(&[])).is_err());
        assert!(Config::from_toml_with_env("tau = 0", env(&[])).is_err());
        assert!(Config::from_toml_with_env("top_k = 0", env(&[])).is_err());
        assert!(Config::from_toml_with_env("penalty_factor = 1.0", env(&[])).is_err());
        assert!(Config::from_toml_with_env("llm = \"http\"", env(&[])).is_err());
        assert!(Config::from_toml_with_env("colour = 1", env(&[])).is_err());
        assert!(Config::from_toml_with_env("", env(&[("WALKRAG_NOPE", "1")])).is_err());
        assert!(Config::from_toml_with_env("", env(&[("WALKRAG_TAU", "high")])).is_err());
    }

    #[test]
    fn relative_paths_follow_the_file() {
        let mut c =
            Config { map_path: Some("map.osm".into()), corpus_path: Some("/abs.jsonl".into()), ..Config::default() };
        c.resolve_relative(Path::new("/data"));
        assert_eq!(c.map_path, Some(PathBuf::from("/data/map.osm")));
        assert_eq!(c.corpus_path, Some(PathBuf::from("/abs.jsonl")));
    }
}
