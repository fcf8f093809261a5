//! The versioned run configuration shared by every subcommand.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtergen::{DEFAULT_POOL_CAP, DEFAULT_REFRESH_PERIOD};
use crate::pipeline::{PipelineConfig, DEFAULT_MAX_KEYWORDS};
use crate::ranker::{TrainConfig, DEFAULT_THRESHOLD, DEFAULT_TOP_K};
use crate::textproc::TokenizerConfig;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub articles: Option<PathBuf>,
    pub tweets: Option<PathBuf>,
    /// Annotation files; together they must hold exactly two annotators.
    pub labels: Vec<PathBuf>,
    pub state_dir: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    /// Tokenizer settings file; built-in lists when absent.
    pub tokenizer: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub seed: u64,
    /// Processing window: `YYYY-MM-DD` or `START..END`.
    pub window: Option<String>,
    /// Training window for experiments.
    pub train_window: Option<String>,
    pub cap: usize,
    /// Seconds between predicate pool rebuilds.
    pub refresh_period: i64,
    pub max_keywords: usize,
    pub threshold: f64,
    pub top_k: usize,
    pub paths: Paths,
    pub train: TrainConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            version: CONFIG_VERSION,
            seed: 42,
            window: None,
            train_window: None,
            cap: DEFAULT_POOL_CAP,
            refresh_period: DEFAULT_REFRESH_PERIOD,
            max_keywords: DEFAULT_MAX_KEYWORDS,
            threshold: DEFAULT_THRESHOLD,
            top_k: DEFAULT_TOP_K,
            paths: Paths::default(),
            train: TrainConfig::default(),
        }
    }
}

impl RunConfig {
    /// Parse a config file; relative paths resolve against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut config =
            Self::from_toml(&text).map_err(|e| Error::Config(format!("{}: {}", path.display(), e.root())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let p = &mut config.paths;
        for slot in [
            &mut p.articles,
            &mut p.tweets,
            &mut p.state_dir,
            &mut p.out_dir,
            &mut p.tokenizer,
        ] {
            if let Some(rel) = slot.as_mut() {
                if rel.is_relative() {
                    *rel = base.join(&*rel);
                }
            }
        }
        for l in &mut p.labels {
            if l.is_relative() {
                *l = base.join(&*l);
            }
        }
        Ok(config)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "config version {} is not supported (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        if self.cap == 0 {
            return Err(Error::Config("cap must be at least 1".into()));
        }
        if self.refresh_period <= 0 {
            return Err(Error::Config("refresh_period must be positive".into()));
        }
        if self.max_keywords == 0 {
            return Err(Error::Config("max_keywords must be at least 1".into()));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::Config(format!(
                "threshold must be in (0,1), got {}",
                self.threshold
            )));
        }
        if self.top_k == 0 {
            return Err(Error::Config("top_k must be at least 1".into()));
        }
        self.train.validate()
    }

    pub fn pipeline(&self) -> Result<PipelineConfig> {
        let tokenizer = match &self.paths.tokenizer {
            Some(p) => TokenizerConfig::load(p)?,
            None => TokenizerConfig::default(),
        };
        Ok(PipelineConfig {
            cap: self.cap,
            refresh_period: self.refresh_period,
            max_keywords: self.max_keywords,
            tokenizer,
        })
    }

    /// A configured path, or a config error naming the missing setting.
    pub fn require<'a>(&self, what: &str, path: &'a Option<PathBuf>) -> Result<&'a Path> {
        path.as_deref()
            .ok_or_else(|| Error::Config(format!("missing path: {what}")))
    }
}
