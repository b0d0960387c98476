//! Run configuration shared by the `index` and `strip` commands.
//!
//! Values come from built-in defaults, then an optional key=value file, then
//! command-line flags; later sources win.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::counters::{
    BackendConfig, BackendKind, GmConfig, KBitConfig, DEFAULT_GM_COUNTERS,
    DEFAULT_GM_REPORT_THRESHOLD, DEFAULT_THRESHOLD,
};
use crate::counters::kbit::{DEFAULT_COUNTER_WIDTH, DEFAULT_HASH_BITS};
use crate::detector::DetectorConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub corpus: Option<PathBuf>,
    pub backend: BackendKind,
    pub threshold: u32,
    pub hash_bits: u32,
    pub counter_width: u32,
    pub morris: bool,
    pub gm_counters: usize,
    pub gm_threshold: u64,
    pub gm_store_keys: bool,
    pub detector: DetectorConfig,
    pub output: Option<PathBuf>,
    pub workers: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            corpus: None,
            backend: BackendKind::Exact,
            threshold: DEFAULT_THRESHOLD,
            hash_bits: DEFAULT_HASH_BITS,
            counter_width: DEFAULT_COUNTER_WIDTH,
            morris: false,
            gm_counters: DEFAULT_GM_COUNTERS,
            gm_threshold: DEFAULT_GM_REPORT_THRESHOLD,
            gm_store_keys: false,
            detector: DetectorConfig::default(),
            output: None,
            workers: 1,
            seed: 0,
        }
    }
}

/// Every field optional; the same shape serves the config file and the
/// parsed flags.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub corpus: Option<PathBuf>,
    pub backend: Option<String>,
    pub threshold: Option<u32>,
    pub hash_bits: Option<u32>,
    pub counter_width: Option<u32>,
    pub morris: Option<bool>,
    pub gm_counters: Option<usize>,
    pub gm_threshold: Option<u64>,
    pub gm_store_keys: Option<bool>,
    pub gap_max: Option<usize>,
    pub p_max: Option<usize>,
    pub e_max: Option<usize>,
    pub min_len: Option<usize>,
    pub heuristics: Option<bool>,
    pub output: Option<PathBuf>,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
}

impl ConfigOverrides {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| ConfigError::Invalid(format!("{}: {}", path.display(), e.message())))
    }

    /// Fields set in `self` win over those in `base`.
    pub fn over(self, base: ConfigOverrides) -> ConfigOverrides {
        macro_rules! pick {
            ($($field:ident),*) => {
                ConfigOverrides { $($field: self.$field.or(base.$field)),* }
            };
        }
        pick!(
            corpus, backend, threshold, hash_bits, counter_width, morris, gm_counters, gm_threshold,
            gm_store_keys, gap_max, p_max, e_max, min_len, heuristics, output, workers, seed
        )
    }
}

impl RunConfig {
    pub fn apply(&mut self, o: &ConfigOverrides) -> Result<(), ConfigError> {
        macro_rules! set {
            ($($field:ident => $target:expr),* $(,)?) => {
                $(if let Some(v) = &o.$field { $target = v.clone(); })*
            };
        }
        if let Some(b) = &o.backend {
            self.backend = b.parse().map_err(|e: crate::counters::CounterError| ConfigError::Invalid(e.to_string()))?;
        }
        set! {
            threshold => self.threshold,
            hash_bits => self.hash_bits,
            counter_width => self.counter_width,
            morris => self.morris,
            gm_counters => self.gm_counters,
            gm_threshold => self.gm_threshold,
            gm_store_keys => self.gm_store_keys,
            gap_max => self.detector.gap_max,
            p_max => self.detector.p_max,
            e_max => self.detector.e_max,
            min_len => self.detector.min_len,
            heuristics => self.detector.heuristics,
            workers => self.workers,
            seed => self.seed,
        }
        if o.corpus.is_some() {
            self.corpus = o.corpus.clone();
        }
        if o.output.is_some() {
            self.output = o.output.clone();
        }
        Ok(())
    }

    /// Defaults, then `file` if given, then `flags`.
    pub fn resolve(file: Option<&Path>, flags: &ConfigOverrides) -> Result<Self, ConfigError> {
        let base = match file {
            Some(path) => ConfigOverrides::from_file(path)?,
            None => ConfigOverrides::default(),
        };
        // merged before parsing so a flag can replace a bad file value
        let mut cfg = RunConfig::default();
        cfg.apply(&flags.clone().over(base))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn backend_config(&self) -> BackendConfig {
        match self.backend {
            BackendKind::Exact => BackendConfig::Exact,
            BackendKind::Crc64Map => BackendConfig::Crc64Map,
            BackendKind::KBitArray => BackendConfig::KBitArray(KBitConfig {
                hash_bits: self.hash_bits,
                counter_width: self.counter_width,
                morris: self.morris,
                seed: self.seed,
            }),
            BackendKind::Gm => BackendConfig::Gm(GmConfig {
                counters: self.gm_counters,
                report_threshold: self.gm_threshold,
                store_keys: self.gm_store_keys,
            }),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        if self.threshold == 0 {
            return invalid("threshold must be at least 1".into());
        }
        if self.workers == 0 {
            return invalid("workers must be at least 1".into());
        }
        if self.gm_counters == 0 {
            return invalid("gm_counters must be at least 1".into());
        }
        if self.backend == BackendKind::KBitArray {
            let k = KBitConfig {
                hash_bits: self.hash_bits,
                counter_width: self.counter_width,
                morris: self.morris,
                seed: self.seed,
            };
            k.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
            if !self.morris && self.threshold > u32::from(k.max_value()) {
                return invalid(format!(
                    "threshold {} does not fit {}-bit counters without Morris counting",
                    self.threshold, self.counter_width
                ));
            }
        }
        self.detector
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    /// True when the worker count can change the pass-1 result.
    pub fn merge_is_approximate(&self) -> bool {
        self.workers > 1
            && match self.backend {
                BackendKind::Gm => true,
                BackendKind::KBitArray => self.morris,
                _ => false,
            }
    }

    /// `key=value` provenance lines for output headers. The worker count is
    /// left out so that exact backends produce identical files for any pool
    /// size.
    pub fn header(&self) -> Vec<String> {
        let mut h = self.backend_header();
        h.extend(self.detector_header());
        if self.merge_is_approximate() {
            h.push("approximate=true".into());
        }
        h
    }

    pub fn backend_header(&self) -> Vec<String> {
        let mut h = vec![
            format!("backend={}", self.backend),
            format!("threshold={}", self.threshold),
        ];
        match self.backend {
            BackendKind::KBitArray => {
                h.push(format!("hash_bits={}", self.hash_bits));
                h.push(format!("counter_width={}", self.counter_width));
                h.push(format!("morris={}", self.morris));
                if self.morris {
                    h.push(format!("seed={}", self.seed));
                }
            }
            BackendKind::Gm => {
                h.push(format!("gm_counters={}", self.gm_counters));
                h.push(format!("gm_threshold={}", self.gm_threshold));
                h.push(format!("gm_store_keys={}", self.gm_store_keys));
            }
            _ => {}
        }
        h
    }

    pub fn detector_header(&self) -> Vec<String> {
        let d = &self.detector;
        vec![
            format!("gap_max={}", d.gap_max),
            format!("p_max={}", d.p_max),
            format!("e_max={}", d.e_max),
            format!("min_len={}", d.min_len),
            format!("heuristics={}", d.heuristics),
        ]
    }
}
