//! Pass 2: locate preamble end and epilogue start in each file.
//!
//! Scanning from the top, leading infrequent lines are skipped until the
//! first frequent line. From there a gap counter is reset on every frequent
//! line and incremented on every infrequent one; the scan stops once
//! `gap_max` infrequent lines follow each other (or the window runs out) and
//! the preamble ends at the last frequent line seen. The epilogue is found
//! the same way scanning backwards from the end of the file.
//!
//! Optional regex heuristics recognize the standard start/end markers and
//! can only widen the stripped regions.

use std::fmt;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::counters::FrequencyStore;
use crate::preprocess::{
    extract_window_with, NormalizedLine, RawLine, DEFAULT_E_MAX, DEFAULT_MIN_LEN, DEFAULT_P_MAX,
};

pub const DEFAULT_GAP_MAX: usize = 10;

/// Anything that can say whether a normalized line is frequent.
pub trait FrequencyOracle {
    fn is_frequent(&self, text: &str) -> bool;
}

impl FrequencyOracle for FrequencyStore {
    fn is_frequent(&self, text: &str) -> bool {
        FrequencyStore::is_frequent(self, text)
    }
}

impl<F: Fn(&str) -> bool> FrequencyOracle for F {
    fn is_frequent(&self, text: &str) -> bool {
        self(text)
    }
}

#[derive(Debug, Error)]
#[error("invalid detector configuration: {0}")]
pub struct ConfigError(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub gap_max: usize,
    pub p_max: usize,
    pub e_max: usize,
    pub heuristics: bool,
    pub min_len: usize,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            gap_max: DEFAULT_GAP_MAX,
            p_max: DEFAULT_P_MAX,
            e_max: DEFAULT_E_MAX,
            heuristics: false,
            min_len: DEFAULT_MIN_LEN,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.gap_max == 0 {
            return Err(ConfigError("gap_max must be at least 1".into()));
        }
        if self.p_max == 0 || self.e_max == 0 {
            return Err(ConfigError("p_max and e_max must be at least 1".into()));
        }
        Ok(())
    }
}

/// Detected boundaries of one file, in raw line indices. Both are inclusive:
/// `preamble_end` is the last preamble line, `epilogue_start` the first
/// epilogue line.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub file: String,
    pub preamble_end: Option<usize>,
    pub epilogue_start: Option<usize>,
}

impl BoundaryReport {
    pub fn new(file: impl Into<String>, preamble_end: Option<usize>, epilogue_start: Option<usize>) -> Self {
        Self {
            file: file.into(),
            preamble_end,
            epilogue_start,
        }
    }

    /// `file<TAB>preamble_end<TAB>epilogue_start`, `-` for absent.
    pub fn to_tsv(&self) -> String {
        format!(
            "{}\t{}\t{}",
            self.file,
            fmt_opt(self.preamble_end),
            fmt_opt(self.epilogue_start)
        )
    }

    pub fn parse_tsv(line: &str) -> Result<Self, ParseReportError> {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(ParseReportError(format!(
                "expected 3 TAB-separated fields, got {}",
                fields.len()
            )));
        }
        let report = BoundaryReport::new(fields[0], parse_opt(fields[1])?, parse_opt(fields[2])?);
        if let (Some(p), Some(e)) = (report.preamble_end, report.epilogue_start) {
            if p >= e {
                return Err(ParseReportError(format!(
                    "preamble end {p} is not before epilogue start {e}"
                )));
            }
        }
        Ok(report)
    }
}

impl fmt::Display for BoundaryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_tsv())
    }
}

#[derive(Debug, Error)]
#[error("malformed report record: {0}")]
pub struct ParseReportError(pub String);

fn fmt_opt(v: Option<usize>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

fn parse_opt(s: &str) -> Result<Option<usize>, ParseReportError> {
    match s.trim() {
        "-" => Ok(None),
        t => t
            .parse()
            .map(Some)
            .map_err(|_| ParseReportError(format!("bad line index {t:?}"))),
    }
}

/// Gap scan over lines in scan order; returns the position of the last
/// frequent line before the first run of `gap_max` infrequent lines.
fn gap_scan<'a, O, I>(lines: I, oracle: &O, gap_max: usize) -> Option<&'a NormalizedLine>
where
    O: FrequencyOracle + ?Sized,
    I: Iterator<Item = &'a NormalizedLine>,
{
    let mut lines = lines.skip_while(|l| !oracle.is_frequent(&l.text));
    let mut last = lines.next()?;
    let mut gap = 0;
    for line in lines {
        if gap >= gap_max {
            break;
        }
        if oracle.is_frequent(&line.text) {
            last = line;
            gap = 0;
        } else {
            gap += 1;
        }
    }
    Some(last)
}

pub fn find_preamble_end<O: FrequencyOracle + ?Sized>(
    top: &[NormalizedLine],
    oracle: &O,
    cfg: &DetectorConfig,
) -> Option<usize> {
    gap_scan(top.iter(), oracle, cfg.gap_max).map(|l| l.raw_index)
}

pub fn find_epilogue_start<O: FrequencyOracle + ?Sized>(
    bottom: &[NormalizedLine],
    oracle: &O,
    cfg: &DetectorConfig,
) -> Option<usize> {
    gap_scan(bottom.iter().rev(), oracle, cfg.gap_max).map(|l| l.raw_index)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Zone {
    NearStart,
    NearEnd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Marker {
    Preamble,
    Epilogue,
    None,
}

fn preamble_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r"^[\s*]*\*\s*(?:START\s+OF\s+(?:THE|THIS)\s+PROJECT\s+GUTENBERG|END[\s*]THE\s+SMALL\s+PRINT!)",
        )
        .expect("valid regex")
    })
}

fn epilogue_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r"^(?:This|THIS|this|Is|IS|is|The|THE|the|Of|OF|of|[*\s])*(?:End|END|end)(?:\s|Of|OF|of|The|THE|the|This|THIS|this)*(?:Project\s+Gutenberg|PROJECT\s+GUTENBERG)",
        )
        .expect("valid regex")
    })
}

/// Classifies a raw line against the start/end marker patterns.
pub fn match_heuristic(line: &RawLine, zone: Zone) -> Marker {
    match zone {
        Zone::NearStart if preamble_regex().is_match(&line.text) => Marker::Preamble,
        Zone::NearEnd
            if epilogue_regex().is_match(&line.text) || line.text.starts_with("ETEXT") =>
        {
            Marker::Epilogue
        }
        _ => Marker::None,
    }
}

/// Frequency-only boundaries for a file.
pub fn detect_by_frequency<O: FrequencyOracle + ?Sized>(
    lines: &[RawLine],
    oracle: &O,
    cfg: &DetectorConfig,
) -> (Option<usize>, Option<usize>) {
    let window = extract_window_with(lines, cfg.p_max, cfg.e_max, cfg.min_len);
    (
        find_preamble_end(&window.top, oracle, cfg),
        find_epilogue_start(&window.bottom, oracle, cfg),
    )
}

/// Last preamble marker within the first `p_max` raw lines and first
/// epilogue marker within the last `e_max` raw lines.
pub fn heuristic_markers(lines: &[RawLine], cfg: &DetectorConfig) -> (Option<usize>, Option<usize>) {
    let preamble = lines
        .iter()
        .take(cfg.p_max)
        .filter(|l| match_heuristic(l, Zone::NearStart) == Marker::Preamble)
        .map(|l| l.index)
        .last();
    let near_end = lines.len().saturating_sub(cfg.e_max);
    let epilogue = lines[near_end..]
        .iter()
        .find(|l| match_heuristic(l, Zone::NearEnd) == Marker::Epilogue)
        .map(|l| l.index);
    (preamble, epilogue)
}

fn combine(a: Option<usize>, b: Option<usize>, pick: fn(usize, usize) -> usize) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(pick(x, y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Full pass-2 detection for one file.
///
/// With heuristics on, the preamble extends to the last start marker and
/// the epilogue to the first end marker. When the two boundaries cross the
/// epilogue is dropped.
pub fn detect<O: FrequencyOracle + ?Sized>(
    file: &str,
    lines: &[RawLine],
    oracle: &O,
    cfg: &DetectorConfig,
) -> BoundaryReport {
    let (mut preamble_end, mut epilogue_start) = detect_by_frequency(lines, oracle, cfg);
    if cfg.heuristics {
        let (p, e) = heuristic_markers(lines, cfg);
        preamble_end = combine(preamble_end, p, usize::max);
        epilogue_start = combine(epilogue_start, e, usize::min);
    }
    if let (Some(p), Some(e)) = (preamble_end, epilogue_start) {
        if p >= e {
            epilogue_start = None;
        }
    }
    BoundaryReport::new(file, preamble_end, epilogue_start)
}

/// Lines strictly between the detected preamble and epilogue.
pub fn strip<'a>(lines: &'a [RawLine], report: &BoundaryReport) -> &'a [RawLine] {
    let start = report.preamble_end.map_or(0, |p| p + 1).min(lines.len());
    let end = report.epilogue_start.map_or(lines.len(), |e| e.min(lines.len()));
    if start >= end {
        &[]
    } else {
        &lines[start..end]
    }
}
