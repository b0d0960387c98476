//! Frequent-line data structures.
//!
//! Every backend follows the same two-phase life cycle: lines are recorded
//! during pass 1, the store is sealed, and pass 2 only asks whether a line is
//! frequent. Backends:
//!
//! * `Exact` counts full line texts.
//! * `Crc64Map` counts CRC-64 keys; two lines only merge on a checksum collision.
//! * `KBitArray` indexes a fixed array of small counters with the low `k`
//!   bits of the checksum. It never misses a frequent line, but colliding
//!   lines can look frequent.
//! * `Gm` runs the Generalized Majority summary and reports monitored lines
//!   whose residual counter reaches the report threshold.

pub mod crc64;
pub mod gm;
pub mod kbit;

use std::collections::HashMap;
use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::preprocess::{decode_latin1, encode_latin1};

pub use crc64::{crc64, LineKey};
pub use gm::GeneralizedMajority;
pub use kbit::{morris_estimate, morris_increment, KBitArray, KBitConfig};

/// A line is frequent when it was recorded at least this many times.
pub const DEFAULT_THRESHOLD: u32 = 10;
pub const DEFAULT_GM_COUNTERS: usize = 100_000;
/// GM counters are residuals after decrements, so this is not a count.
pub const DEFAULT_GM_REPORT_THRESHOLD: u64 = 5;

#[derive(Debug, Error)]
pub enum CounterError {
    #[error("store is sealed; no more lines can be recorded")]
    Sealed,
    #[error("invalid counter configuration: {0}")]
    Config(String),
    #[error("cannot merge stores: {0}")]
    Merge(String),
    #[error("{0} is not supported by the {1} backend")]
    Unsupported(&'static str, BackendKind),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("index encoding: {0}")]
    Encoding(#[from] bincode::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BackendKind {
    Exact,
    Crc64Map,
    KBitArray,
    Gm,
}

impl BackendKind {
    pub fn name(self) -> &'static str {
        match self {
            BackendKind::Exact => "exact",
            BackendKind::Crc64Map => "crc64",
            BackendKind::KBitArray => "kbit",
            BackendKind::Gm => "gm",
        }
    }
}

impl fmt::Display for BackendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BackendKind {
    type Err = CounterError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(BackendKind::Exact),
            "crc64" | "crc64map" | "crc" => Ok(BackendKind::Crc64Map),
            "kbit" | "kbitarray" | "hash" => Ok(BackendKind::KBitArray),
            "gm" | "misra-gries" => Ok(BackendKind::Gm),
            other => Err(CounterError::Config(format!(
                "unknown backend {other:?} (expected exact, crc64, kbit or gm)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GmConfig {
    pub counters: usize,
    pub report_threshold: u64,
    /// Monitor CRC-64 keys instead of full texts.
    pub store_keys: bool,
}

impl Default for GmConfig {
    fn default() -> Self {
        Self {
            counters: DEFAULT_GM_COUNTERS,
            report_threshold: DEFAULT_GM_REPORT_THRESHOLD,
            store_keys: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BackendConfig {
    Exact,
    Crc64Map,
    KBitArray(KBitConfig),
    Gm(GmConfig),
}

impl BackendConfig {
    pub fn kind(&self) -> BackendKind {
        match self {
            BackendConfig::Exact => BackendKind::Exact,
            BackendConfig::Crc64Map => BackendKind::Crc64Map,
            BackendConfig::KBitArray(_) => BackendKind::KBitArray,
            BackendConfig::Gm(_) => BackendKind::Gm,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
enum GmSummary {
    Lines(GeneralizedMajority<String>),
    Keys(GeneralizedMajority<LineKey>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
enum Survivors {
    Lines(HashMap<String, u64>),
    Keys(HashMap<LineKey, u64>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GmBackend {
    config: GmConfig,
    summary: GmSummary,
    survivors: Option<Survivors>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
enum Backend {
    Exact(HashMap<String, u32>),
    Crc64(HashMap<LineKey, u32>),
    KBit(KBitArray),
    Gm(GmBackend),
}

/// Checksum of a line as stored on disk (Latin-1 bytes).
pub fn line_key(text: &str) -> LineKey {
    if text.is_ascii() {
        LineKey(crc64(text.as_bytes()))
    } else {
        LineKey(crc64(&encode_latin1(text)))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrequencyStore {
    threshold: u32,
    sealed: bool,
    approximate: bool,
    backend: Backend,
}

impl FrequencyStore {
    pub fn new(config: BackendConfig, threshold: u32) -> Result<Self, CounterError> {
        if threshold == 0 {
            return Err(CounterError::Config("threshold K must be at least 1".into()));
        }
        let backend = match config {
            BackendConfig::Exact => Backend::Exact(HashMap::new()),
            BackendConfig::Crc64Map => Backend::Crc64(HashMap::new()),
            BackendConfig::KBitArray(cfg) => {
                if !cfg.morris && threshold > u32::from(cfg.max_value()) {
                    return Err(CounterError::Config(format!(
                        "threshold {threshold} exceeds the {}-bit counter range; enable Morris counting",
                        cfg.counter_width
                    )));
                }
                Backend::KBit(KBitArray::new(cfg)?)
            }
            BackendConfig::Gm(cfg) => {
                if cfg.counters == 0 {
                    return Err(CounterError::Config("GM needs at least one counter".into()));
                }
                let summary = if cfg.store_keys {
                    GmSummary::Keys(GeneralizedMajority::new(cfg.counters))
                } else {
                    GmSummary::Lines(GeneralizedMajority::new(cfg.counters))
                };
                Backend::Gm(GmBackend {
                    config: cfg,
                    summary,
                    survivors: None,
                })
            }
        };
        Ok(Self {
            threshold,
            sealed: false,
            approximate: false,
            backend,
        })
    }

    pub fn kind(&self) -> BackendKind {
        match &self.backend {
            Backend::Exact(_) => BackendKind::Exact,
            Backend::Crc64(_) => BackendKind::Crc64Map,
            Backend::KBit(_) => BackendKind::KBitArray,
            Backend::Gm(_) => BackendKind::Gm,
        }
    }

    pub fn threshold(&self) -> u32 {
        self.threshold
    }

    pub fn is_sealed(&self) -> bool {
        self.sealed
    }

    /// True once an approximate merge (GM replay, Morris re-encoding) happened.
    pub fn is_approximate(&self) -> bool {
        self.approximate
    }

    pub fn record(&mut self, text: &str) -> Result<(), CounterError> {
        if self.sealed {
            return Err(CounterError::Sealed);
        }
        match &mut self.backend {
            Backend::Exact(map) => {
                if let Some(c) = map.get_mut(text) {
                    *c = c.saturating_add(1);
                } else {
                    map.insert(text.to_owned(), 1);
                }
            }
            Backend::Crc64(map) => {
                let c = map.entry(line_key(text)).or_insert(0);
                *c = c.saturating_add(1);
            }
            Backend::KBit(array) => array.record(line_key(text)),
            Backend::Gm(gm) => match &mut gm.summary {
                GmSummary::Lines(s) => s.offer(&text.to_owned()),
                GmSummary::Keys(s) => s.offer(&line_key(text)),
            },
        }
        Ok(())
    }

    /// Ends pass 1. GM extracts its surviving counters into a lookup table.
    pub fn seal(&mut self) {
        if self.sealed {
            return;
        }
        if let Backend::Gm(gm) = &mut self.backend {
            gm.survivors = Some(match &gm.summary {
                GmSummary::Lines(s) => Survivors::Lines(s.counters().into_iter().collect()),
                GmSummary::Keys(s) => Survivors::Keys(s.counters().into_iter().collect()),
            });
        }
        self.sealed = true;
    }

    /// Recorded count (or estimate / residual counter) behind a line.
    pub fn count(&self, text: &str) -> f64 {
        match &self.backend {
            Backend::Exact(map) => map.get(text).copied().map_or(0.0, f64::from),
            Backend::Crc64(map) => map.get(&line_key(text)).copied().map_or(0.0, f64::from),
            Backend::KBit(array) => array.estimate(line_key(text)),
            Backend::Gm(gm) => {
                let v = match (&gm.survivors, &gm.summary) {
                    (Some(Survivors::Lines(m)), _) => m.get(text).copied().unwrap_or(0),
                    (Some(Survivors::Keys(m)), _) => m.get(&line_key(text)).copied().unwrap_or(0),
                    (None, GmSummary::Lines(s)) => s.count(&text.to_owned()),
                    (None, GmSummary::Keys(s)) => s.count(&line_key(text)),
                };
                v as f64
            }
        }
    }

    pub fn is_frequent(&self, text: &str) -> bool {
        match &self.backend {
            Backend::Gm(gm) => self.count(text) >= gm.config.report_threshold.max(1) as f64,
            _ => self.count(text) >= f64::from(self.threshold),
        }
    }

    /// Folds a store built over another shard of the corpus into this one.
    pub fn merge(&mut self, other: FrequencyStore) -> Result<(), CounterError> {
        if self.sealed || other.sealed {
            return Err(CounterError::Merge("sealed stores cannot be merged".into()));
        }
        if self.threshold != other.threshold {
            return Err(CounterError::Merge("different thresholds".into()));
        }
        self.approximate |= other.approximate;
        match (&mut self.backend, other.backend) {
            (Backend::Exact(a), Backend::Exact(b)) => {
                for (text, c) in b {
                    let e = a.entry(text).or_insert(0);
                    *e = e.saturating_add(c);
                }
            }
            (Backend::Crc64(a), Backend::Crc64(b)) => {
                for (key, c) in b {
                    let e = a.entry(key).or_insert(0);
                    *e = e.saturating_add(c);
                }
            }
            (Backend::KBit(a), Backend::KBit(b)) => {
                a.merge(&b)?;
                self.approximate |= a.config().morris;
            }
            (Backend::Gm(a), Backend::Gm(b)) => {
                if a.config != b.config {
                    return Err(CounterError::Merge("GM stores with different configs".into()));
                }
                match (&mut a.summary, &b.summary) {
                    (GmSummary::Lines(x), GmSummary::Lines(y)) => x.merge_replay(y),
                    (GmSummary::Keys(x), GmSummary::Keys(y)) => x.merge_replay(y),
                    _ => unreachable!("equal configs imply equal summaries"),
                }
                self.approximate = true;
            }
            (_, b) => {
                let other_kind = match b {
                    Backend::Exact(_) => BackendKind::Exact,
                    Backend::Crc64(_) => BackendKind::Crc64Map,
                    Backend::KBit(_) => BackendKind::KBitArray,
                    Backend::Gm(_) => BackendKind::Gm,
                };
                return Err(CounterError::Merge(format!(
                    "backend mismatch: {} vs {}",
                    self.kind(),
                    other_kind
                )));
            }
        }
        Ok(())
    }

    /// Frequent lines with their counts, sorted by text. Only backends that
    /// keep line texts can list them.
    pub fn frequent_lines(&self) -> Result<Vec<(u64, String)>, CounterError> {
        let mut out: Vec<(u64, String)> = match &self.backend {
            Backend::Exact(map) => map
                .iter()
                .filter(|(_, &c)| c >= self.threshold)
                .map(|(t, &c)| (u64::from(c), t.clone()))
                .collect(),
            Backend::Gm(gm) => {
                let min = gm.config.report_threshold.max(1);
                let counters = match &gm.summary {
                    GmSummary::Lines(s) => s.counters(),
                    GmSummary::Keys(_) => {
                        return Err(CounterError::Unsupported("listing lines", self.kind()))
                    }
                };
                counters.into_iter().filter(|(_, c)| *c >= min).map(|(t, c)| (c, t)).collect()
            }
            _ => return Err(CounterError::Unsupported("listing lines", self.kind())),
        };
        out.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)));
        Ok(out)
    }

    /// Exact per-line counts, when this is an `Exact` store.
    pub fn exact_counts(&self) -> Option<&HashMap<String, u32>> {
        match &self.backend {
            Backend::Exact(map) => Some(map),
            _ => None,
        }
    }

    /// Number of distinct entries (lines, keys, non-zero counters or
    /// monitored items) held by the backend.
    pub fn len(&self) -> usize {
        match &self.backend {
            Backend::Exact(map) => map.len(),
            Backend::Crc64(map) => map.len(),
            Backend::KBit(a) => a.nonzero_counters(),
            Backend::Gm(gm) => match &gm.summary {
                GmSummary::Lines(s) => s.monitored_len(),
                GmSummary::Keys(s) => s.monitored_len(),
            },
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sealed exact store holding an imported frequent-line list.
    pub fn from_frequent_lines(lines: &[(u64, String)], threshold: u32) -> Result<Self, CounterError> {
        let mut store = Self::new(BackendConfig::Exact, threshold)?;
        if let Backend::Exact(map) = &mut store.backend {
            for (c, t) in lines {
                let e = map.entry(t.clone()).or_insert(0);
                *e = e.saturating_add(u32::try_from(*c).unwrap_or(u32::MAX));
            }
        }
        store.seal();
        Ok(store)
    }

    pub fn save<W: Write>(&self, w: W) -> Result<(), CounterError> {
        bincode::serialize_into(w, self)?;
        Ok(())
    }

    pub fn load<R: io::Read>(r: R) -> Result<Self, CounterError> {
        Ok(bincode::deserialize_from(r)?)
    }
}

/// Writes `count<TAB>line` records, one per LF-terminated line, text
/// encoded as Latin-1.
pub fn write_frequent_lines<W: Write>(mut w: W, lines: &[(u64, String)]) -> io::Result<()> {
    for (count, text) in lines {
        write!(w, "{count}\t")?;
        w.write_all(&encode_latin1(text))?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn read_frequent_lines<R: BufRead>(mut r: R) -> Result<Vec<(u64, String)>, CounterError> {
    let mut out = Vec::new();
    let mut buf = Vec::new();
    let mut line_no = 0;
    loop {
        buf.clear();
        if r.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        line_no += 1;
        let rec = buf.strip_suffix(b"\n").unwrap_or(&buf);
        let tab = rec.iter().position(|&b| b == b'\t').ok_or(CounterError::Parse {
            line: line_no,
            msg: "missing TAB".into(),
        })?;
        let count = std::str::from_utf8(&rec[..tab])
            .ok()
            .and_then(|s| s.trim().parse::<u64>().ok())
            .ok_or(CounterError::Parse {
                line: line_no,
                msg: "count is not an unsigned integer".into(),
            })?;
        out.push((count, decode_latin1(&rec[tab + 1..])));
    }
    Ok(out)
}
