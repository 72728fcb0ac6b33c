//! Pipeline configuration: `key = value` lines, `#` comments.
//!
//! Relative paths resolve against the config file's directory. Every key can
//! be overridden on the command line with `--set key=value`.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDate, Utc};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScorerKind {
    External,
    Baseline,
    Disabled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub tweets: Option<PathBuf>,
    pub users: Option<PathBuf>,
    pub keywords: Option<PathBuf>,
    /// Built-in list when unset.
    pub stopwords: Option<PathBuf>,
    /// Built-in gazetteer when unset.
    pub gazetteer: Option<PathBuf>,
    pub region_shapes: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub offense_scorer: ScorerKind,
    pub offense_scores: Option<PathBuf>,
    pub offense_train: Option<PathBuf>,
    pub bot_train: Option<PathBuf>,
    pub bot_train_raw: bool,
    pub collection_date: Option<DateTime<Utc>>,
    pub seed: u64,
    pub min_community_size: usize,
    pub offense_threshold: f64,
    pub bot_threshold: f64,
    pub top_n_hashtags: usize,
    pub top_n_ngrams: usize,
    pub n_trees: usize,
    pub cv_folds: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            tweets: None,
            users: None,
            keywords: None,
            stopwords: None,
            gazetteer: None,
            region_shapes: None,
            labels: None,
            offense_scorer: ScorerKind::Disabled,
            offense_scores: None,
            offense_train: None,
            bot_train: None,
            bot_train_raw: false,
            collection_date: None,
            seed: 42,
            min_community_size: 10,
            offense_threshold: 0.5,
            bot_threshold: 0.75,
            top_n_hashtags: 50,
            top_n_ngrams: 100,
            n_trees: 100,
            cv_folds: 10,
        }
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| config_err(format!("{key}: cannot parse {value:?}")))
}

pub fn parse_date(value: &str) -> Result<DateTime<Utc>> {
    if let Ok(d) = value.parse::<DateTime<Utc>>() {
        return Ok(d);
    }
    NaiveDate::parse_from_str(value, "%Y-%m-%d")
        .map(|d| d.and_hms_opt(0, 0, 0).unwrap().and_utc())
        .map_err(|_| config_err(format!("collection_date: cannot parse {value:?}")))
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let mut cfg = PipelineConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| config_err(format!("{}:{}: expected key = value", path.display(), i + 1)))?;
            cfg.set(k.trim(), v.trim(), Some(base))?;
        }
        Ok(cfg)
    }

    /// Applies one setting; relative paths are joined to `base` when given.
    pub fn set(&mut self, key: &str, value: &str, base: Option<&Path>) -> Result<()> {
        // an empty value unsets an optional path
        let path = || {
            if value.is_empty() {
                return None;
            }
            let p = PathBuf::from(value);
            Some(match base {
                Some(b) if p.is_relative() => b.join(p),
                _ => p,
            })
        };
        match key {
            "tweets" => self.tweets = path(),
            "users" => self.users = path(),
            "keywords" => self.keywords = path(),
            "stopwords" => self.stopwords = path(),
            "gazetteer" => self.gazetteer = path(),
            "region_shapes" => self.region_shapes = path(),
            "labels" => self.labels = path(),
            "offense_scores" => self.offense_scores = path(),
            "offense_train" => self.offense_train = path(),
            "bot_train" => self.bot_train = path(),
            "offense_scorer" => {
                self.offense_scorer = match value {
                    "external" => ScorerKind::External,
                    "baseline" => ScorerKind::Baseline,
                    "none" => ScorerKind::Disabled,
                    other => return Err(config_err(format!("offense_scorer: unknown scorer {other:?}"))),
                }
            }
            "bot_train_raw" => self.bot_train_raw = parse_num(key, value)?,
            "collection_date" if value.is_empty() => self.collection_date = None,
            "collection_date" => self.collection_date = Some(parse_date(value)?),
            "seed" => self.seed = parse_num(key, value)?,
            "min_community_size" => self.min_community_size = parse_num(key, value)?,
            "offense_threshold" => self.offense_threshold = parse_num(key, value)?,
            "bot_threshold" => self.bot_threshold = parse_num(key, value)?,
            "top_n_hashtags" => self.top_n_hashtags = parse_num(key, value)?,
            "top_n_ngrams" => self.top_n_ngrams = parse_num(key, value)?,
            "n_trees" => self.n_trees = parse_num(key, value)?,
            "cv_folds" => self.cv_folds = parse_num(key, value)?,
            other => return Err(config_err(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Applies `key=value` overrides (paths relative to the working directory).
    pub fn apply_overrides(&mut self, overrides: &[String]) -> Result<()> {
        for o in overrides {
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| config_err(format!("override {o:?} is not key=value")))?;
            self.set(k.trim(), v.trim(), None)?;
        }
        Ok(())
    }

    /// Checks required keys, referenced files and value ranges.
    pub fn validate(&self) -> Result<()> {
        let required = [("tweets", &self.tweets), ("users", &self.users), ("keywords", &self.keywords)];
        for (name, p) in required {
            if p.is_none() {
                return Err(config_err(format!("{name} is required")));
            }
        }
        let optional = [
            ("tweets", &self.tweets),
            ("users", &self.users),
            ("keywords", &self.keywords),
            ("stopwords", &self.stopwords),
            ("gazetteer", &self.gazetteer),
            ("region_shapes", &self.region_shapes),
            ("labels", &self.labels),
            ("offense_scores", &self.offense_scores),
            ("offense_train", &self.offense_train),
            ("bot_train", &self.bot_train),
        ];
        for (name, p) in optional {
            if let Some(p) = p {
                if !p.exists() {
                    return Err(config_err(format!("{name}: {} does not exist", p.display())));
                }
            }
        }
        match self.offense_scorer {
            ScorerKind::External if self.offense_scores.is_none() => {
                return Err(config_err("offense_scorer = external needs offense_scores"))
            }
            ScorerKind::Baseline if self.offense_train.is_none() => {
                return Err(config_err("offense_scorer = baseline needs offense_train"))
            }
            _ => {}
        }
        for (name, t) in [("offense_threshold", self.offense_threshold), ("bot_threshold", self.bot_threshold)] {
            if !(0.0..=1.0).contains(&t) {
                return Err(config_err(format!("{name} must lie in [0, 1]")));
            }
        }
        if self.min_community_size == 0 || self.top_n_hashtags == 0 || self.top_n_ngrams == 0 || self.n_trees == 0 {
            return Err(config_err("sizes and counts must be positive"));
        }
        if self.cv_folds < 2 {
            return Err(config_err("cv_folds must be at least 2"));
        }
        Ok(())
    }
}
