//! Corpus ingestion, spool files, external counting, synthetic corpora and
//! scoring against gold boundaries.

mod evaluate;
mod extsort;
mod synthetic;

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;
use walkdir::WalkDir;

use crate::detector::BoundaryReport;
use crate::preprocess::{decode_latin1, encode_latin1};

pub use evaluate::{evaluate, Evaluation, FileError, SideError, SideSummary};
pub use extsort::{external_sort_count, MIN_SORT_BUDGET};
pub use synthetic::{
    default_epilogues, default_preambles, generate_synthetic, synthetic_spool, write_synthetic,
    SyntheticCorpus, SyntheticFile, SyntheticSpec, Template,
};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("report and gold sets differ: {0}")]
    Mismatch(String),
}

impl CorpusError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CorpusError::Io {
            path: path.into(),
            source,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileEntry {
    /// Path relative to the corpus root, `/`-separated. Used as the file id.
    pub id: String,
    pub path: PathBuf,
    pub size: u64,
    pub lines: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusManifest {
    pub root: PathBuf,
    pub files: Vec<FileEntry>,
    /// Entries that could not be read and were left out.
    pub skipped: usize,
}

impl CorpusManifest {
    pub fn len(&self) -> usize {
        self.files.len()
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }
}

/// Plain-text candidates: `.txt` files whose name does not start with
/// "readme" (any case).
pub fn is_candidate(path: &Path) -> bool {
    let is_txt = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("txt"));
    let is_readme = path
        .file_name()
        .and_then(|n| n.to_str())
        .is_some_and(|n| n.to_ascii_lowercase().starts_with("readme"));
    is_txt && !is_readme
}

fn count_lines(bytes: &[u8]) -> usize {
    if bytes.is_empty() {
        return 0;
    }
    let newlines = bytes.iter().filter(|&&b| b == b'\n').count();
    newlines + usize::from(bytes.last() != Some(&b'\n'))
}

/// Recursively lists the candidate files under `root`, sorted by id.
pub fn ingest(root: &Path) -> Result<CorpusManifest, CorpusError> {
    let meta = fs::metadata(root).map_err(|e| CorpusError::io(root, e))?;
    if !meta.is_dir() {
        return Err(CorpusError::io(
            root,
            io::Error::new(io::ErrorKind::InvalidInput, "corpus root is not a directory"),
        ));
    }
    fs::read_dir(root).map_err(|e| CorpusError::io(root, e))?;

    let mut files = Vec::new();
    let mut skipped = 0;
    for entry in WalkDir::new(root).follow_links(true) {
        let entry = match entry {
            Ok(e) => e,
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        if !entry.file_type().is_file() || !is_candidate(entry.path()) {
            continue;
        }
        let bytes = match fs::read(entry.path()) {
            Ok(b) => b,
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        let rel = entry.path().strip_prefix(root).unwrap_or(entry.path());
        let id = rel
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        files.push(FileEntry {
            id,
            path: entry.path().to_path_buf(),
            size: bytes.len() as u64,
            lines: count_lines(&bytes),
        });
    }
    files.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(CorpusManifest {
        root: root.to_path_buf(),
        files,
        skipped,
    })
}

/// Writes normalized lines, one per LF-terminated record, Latin-1 encoded.
pub fn write_spool<'a, W, I>(mut w: W, lines: I) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a str>,
{
    for line in lines {
        w.write_all(&encode_latin1(line))?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn read_spool(path: &Path) -> Result<Vec<String>, CorpusError> {
    let file = File::open(path).map_err(|e| CorpusError::io(path, e))?;
    let mut reader = BufReader::new(file);
    let mut out = Vec::new();
    let mut buf = Vec::new();
    loop {
        buf.clear();
        let n = reader
            .read_until(b'\n', &mut buf)
            .map_err(|e| CorpusError::io(path, e))?;
        if n == 0 {
            break;
        }
        let rec = buf.strip_suffix(b"\n").unwrap_or(&buf);
        out.push(decode_latin1(rec));
    }
    Ok(out)
}

/// Writes reports (or gold annotations) as TSV, preceded by `# ` comment
/// lines.
pub fn write_reports<W: Write>(mut w: W, header: &[String], reports: &[BoundaryReport]) -> io::Result<()> {
    for h in header {
        writeln!(w, "# {h}")?;
    }
    for r in reports {
        writeln!(w, "{}", r.to_tsv())?;
    }
    w.flush()
}

pub fn save_reports(path: &Path, header: &[String], reports: &[BoundaryReport]) -> Result<(), CorpusError> {
    let file = File::create(path).map_err(|e| CorpusError::io(path, e))?;
    write_reports(BufWriter::new(file), header, reports).map_err(|e| CorpusError::io(path, e))
}

/// Reads a report TSV, skipping blank and `#` lines.
pub fn load_reports(path: &Path) -> Result<Vec<BoundaryReport>, CorpusError> {
    let text = fs::read_to_string(path).map_err(|e| CorpusError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let r = BoundaryReport::parse_tsv(line).map_err(|e| CorpusError::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            msg: e.to_string(),
        })?;
        out.push(r);
    }
    Ok(out)
}
