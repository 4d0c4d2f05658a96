//! Pipeline configuration file.
//!
//! ```toml
//! seed = 42
//! profiles = ["profiles/kp.json"]
//! language_pairs = ["ckb-kmr", "kmr-eng", "ckb-eng"]
//!
//! [mining]
//! k = 5
//! min_score = 0.1
//!
//! [validation]
//! max_tokens = 80
//! max_ratio = 3.0
//!
//! [split]
//! ratio = 0.9
//!
//! [paths]
//! data_dir = "data"
//! ```
//!
//! Every key is optional. Relative paths are resolved against the directory
//! holding the file. The `PARAMINE_DATA_DIR`, `PARAMINE_PAGES_DIR`,
//! `PARAMINE_ARTICLES_DIR` and `PARAMINE_ALIGNMENT_DIR` environment
//! variables override the `[paths]` table.

use std::path::{Path, PathBuf};

use paramine_core::alignment::ValidationConfig;
use paramine_core::extractor::SiteProfile;
use paramine_core::{Language, MinerConfig};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: Option<u64>,
    #[serde(default)]
    profiles: Vec<PathBuf>,
    #[serde(default)]
    language_pairs: Vec<String>,
    #[serde(default)]
    mining: RawMining,
    #[serde(default)]
    validation: Option<ValidationConfig>,
    #[serde(default)]
    split: RawSplit,
    #[serde(default)]
    paths: RawPaths,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMining {
    k: Option<usize>,
    min_score: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSplit {
    ratio: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPaths {
    data_dir: Option<PathBuf>,
    pages_dir: Option<PathBuf>,
    articles_dir: Option<PathBuf>,
    alignment_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub data_dir: PathBuf,
    pub pages_dir: PathBuf,
    pub articles_dir: PathBuf,
    pub alignment_dir: PathBuf,
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub seed: u64,
    pub profiles: Vec<SiteProfile>,
    pub language_pairs: Vec<(Language, Language)>,
    pub mining: MinerConfig,
    pub validation: ValidationConfig,
    pub split_ratio: f64,
    pub layout: Layout,
}

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SPLIT_RATIO: f64 = 0.9;

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig::resolve(RawConfig::default(), Path::new("."), &|_| None).expect("defaults are valid")
    }
}

fn parse_pair(s: &str) -> Result<(Language, Language), ConfigError> {
    let bad = || ConfigError::Invalid(format!("language pair `{s}` must look like `ckb-kmr`"));
    let (a, b) = s.split_once('-').ok_or_else(bad)?;
    let (a, b): (Language, Language) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
    if a == b {
        return Err(bad());
    }
    Ok((a, b))
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<PipelineConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_owned(), source })?;
        let raw: RawConfig =
            toml::from_str(&text).map_err(|e| ConfigError::Parse { path: path.to_owned(), message: e.to_string() })?;
        let base = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        PipelineConfig::resolve(raw, base, &|k| std::env::var_os(k).map(PathBuf::from))
    }

    /// Defaults plus environment overrides for the directory layout.
    pub fn from_env() -> PipelineConfig {
        PipelineConfig::resolve(RawConfig::default(), Path::new("."), &|k| std::env::var_os(k).map(PathBuf::from))
            .expect("defaults are valid")
    }

    fn resolve(raw: RawConfig, base: &Path, env: &dyn Fn(&str) -> Option<PathBuf>) -> Result<PipelineConfig, ConfigError> {
        let abs = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };
        let mut profiles = Vec::new();
        for p in raw.profiles {
            let path = abs(p);
            if !path.is_file() {
                return Err(ConfigError::Invalid(format!("profile {} does not exist", path.display())));
            }
            profiles.push(SiteProfile::load(&path).map_err(|e| ConfigError::Invalid(format!("{}: {e}", path.display())))?);
        }
        let language_pairs = raw.language_pairs.iter().map(|s| parse_pair(s)).collect::<Result<Vec<_>, _>>()?;

        let mining = MinerConfig { k: raw.mining.k.unwrap_or(paramine_core::pair_miner::DEFAULT_K), min_score: raw.mining.min_score };
        if mining.k == 0 {
            return Err(ConfigError::Invalid("mining.k must be at least 1".into()));
        }
        if let Some(m) = mining.min_score {
            if !(0.0..=1.0).contains(&m) {
                return Err(ConfigError::Invalid(format!("mining.min_score {m} must be within [0, 1]")));
            }
        }
        let validation = raw.validation.unwrap_or_default();
        if validation.max_tokens == 0 || !(validation.max_ratio >= 1.0) {
            return Err(ConfigError::Invalid("validation.max_tokens must be >= 1 and max_ratio >= 1".into()));
        }
        let split_ratio = raw.split.ratio.unwrap_or(DEFAULT_SPLIT_RATIO);
        if !(split_ratio > 0.0 && split_ratio < 1.0) {
            return Err(ConfigError::Invalid(format!("split.ratio {split_ratio} must be within (0, 1)")));
        }

        let data_dir = env("PARAMINE_DATA_DIR").or(raw.paths.data_dir.map(abs)).unwrap_or_else(|| base.join("data"));
        let sub = |var: &str, configured: Option<PathBuf>, name: &str| {
            env(var).or(configured.map(abs)).unwrap_or_else(|| data_dir.join(name))
        };
        let layout = Layout {
            pages_dir: sub("PARAMINE_PAGES_DIR", raw.paths.pages_dir, "pages"),
            articles_dir: sub("PARAMINE_ARTICLES_DIR", raw.paths.articles_dir, "articles"),
            alignment_dir: sub("PARAMINE_ALIGNMENT_DIR", raw.paths.alignment_dir, "alignment"),
            data_dir,
        };
        Ok(PipelineConfig {
            seed: raw.seed.unwrap_or(DEFAULT_SEED),
            profiles,
            language_pairs,
            mining,
            validation,
            split_ratio,
            layout,
        })
    }
}
