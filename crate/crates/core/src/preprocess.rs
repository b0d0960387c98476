//! Line normalization and window extraction.
//!
//! Raw lines are decoded as Latin-1, so any byte sequence is a valid input.
//! Normalization canonicalizes the typing discrepancies that show up when
//! boilerplate is re-typed or pasted by hand: whitespace runs collapse to a
//! single space, runs of `*` or `-` collapse to `***` / `---`, and the
//! result is trimmed. Lines that end up short or without any ASCII letter
//! are trivial and never take part in frequency counting.

use serde::{Deserialize, Serialize};

/// Minimum length, in characters of the normalized text, of a non-trivial line.
pub const DEFAULT_MIN_LEN: usize = 30;

/// Number of non-trivial lines scanned at the top of each file.
pub const DEFAULT_P_MAX: usize = 300;

/// Number of non-trivial lines scanned at the bottom of each file.
pub const DEFAULT_E_MAX: usize = 300;

/// One line of a source file, with its trailing LF/CR removed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawLine {
    pub text: String,
    pub index: usize,
}

impl RawLine {
    pub fn new(text: impl Into<String>, index: usize) -> Self {
        Self {
            text: text.into(),
            index,
        }
    }
}

/// A non-trivial line after normalization.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NormalizedLine {
    pub text: String,
    pub raw_index: usize,
}

/// Splits file bytes into raw lines.
///
/// Lines are separated by LF; one trailing CR per line is dropped. Bytes are
/// mapped to chars one-to-one (Latin-1), so decoding never fails. A final
/// LF does not produce an extra empty line.
pub fn split_lines(bytes: &[u8]) -> Vec<RawLine> {
    if bytes.is_empty() {
        return Vec::new();
    }
    let body = bytes.strip_suffix(b"\n").unwrap_or(bytes);
    body.split(|&b| b == b'\n')
        .enumerate()
        .map(|(index, line)| {
            let line = line.strip_suffix(b"\r").unwrap_or(line);
            RawLine {
                text: decode_latin1(line),
                index,
            }
        })
        .collect()
}

pub fn decode_latin1(bytes: &[u8]) -> String {
    bytes.iter().map(|&b| b as char).collect()
}

/// Inverse of [`decode_latin1`] for text that came from it. Chars above
/// U+00FF cannot occur in decoded input and are replaced by `?`.
pub fn encode_latin1(text: &str) -> Vec<u8> {
    text.chars()
        .map(|c| u8::try_from(u32::from(c)).unwrap_or(b'?'))
        .collect()
}

fn is_space(c: char) -> bool {
    c.is_ascii_whitespace() || c == '\x0b'
}

/// Canonical form of a line, without the triviality test.
pub fn canonicalize(text: &str) -> String {
    let mut collapsed = String::with_capacity(text.len());
    let mut in_space = false;
    for c in text.chars() {
        if is_space(c) {
            if !in_space {
                collapsed.push(' ');
            }
            in_space = true;
        } else {
            collapsed.push(c);
            in_space = false;
        }
    }

    let mut out = String::with_capacity(collapsed.len());
    let mut chars = collapsed.chars().peekable();
    while let Some(c) = chars.next() {
        if c == '*' || c == '-' {
            let mut run = 1;
            while chars.peek() == Some(&c) {
                chars.next();
                run += 1;
            }
            if run >= 2 {
                out.extend([c, c, c]);
            } else {
                out.push(c);
            }
        } else {
            out.push(c);
        }
    }

    out.trim_matches(is_space).to_string()
}

/// True when canonical text is too short or has no ASCII letter.
pub fn is_trivial(canonical: &str, min_len: usize) -> bool {
    canonical.chars().count() < min_len || !canonical.chars().any(|c| c.is_ascii_alphabetic())
}

/// Normalizes a raw line; `None` means the line is trivial.
pub fn normalize_line(raw: &RawLine, min_len: usize) -> Option<NormalizedLine> {
    let text = canonicalize(&raw.text);
    if is_trivial(&text, min_len) {
        None
    } else {
        Some(NormalizedLine {
            text,
            raw_index: raw.index,
        })
    }
}

/// The normalized lines scanned at each end of a file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Window {
    pub top: Vec<NormalizedLine>,
    pub bottom: Vec<NormalizedLine>,
}

impl Window {
    /// Distinct window lines in file order: the top, then the part of the
    /// bottom past it. Each raw line is yielded once even when the halves
    /// overlap, so a line counts once per file occurrence.
    pub fn lines(&self) -> impl Iterator<Item = &NormalizedLine> {
        let after = self.top.last().map(|l| l.raw_index);
        self.top.iter().chain(
            self.bottom
                .iter()
                .filter(move |l| after.map_or(true, |a| l.raw_index > a)),
        )
    }
}

/// First `p_max` and last `e_max` non-trivial lines of a file.
///
/// Both counts are measured in non-trivial lines. Both halves are in file
/// order, and overlap when the file has fewer than `p_max + e_max`
/// non-trivial lines.
pub fn extract_window(lines: &[RawLine], p_max: usize, e_max: usize) -> Window {
    extract_window_with(lines, p_max, e_max, DEFAULT_MIN_LEN)
}

pub fn extract_window_with(lines: &[RawLine], p_max: usize, e_max: usize, min_len: usize) -> Window {
    let top: Vec<_> = lines
        .iter()
        .filter_map(|l| normalize_line(l, min_len))
        .take(p_max)
        .collect();
    let mut bottom: Vec<_> = lines
        .iter()
        .rev()
        .filter_map(|l| normalize_line(l, min_len))
        .take(e_max)
        .collect();
    bottom.reverse();
    Window { top, bottom }
}
