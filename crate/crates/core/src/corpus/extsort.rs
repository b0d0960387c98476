//! Sort-and-count over a spool file that may not fit in memory: sorted runs
//! are spilled to temporary files, merged, and equal neighbours are counted.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use tempfile::{NamedTempFile, TempDir};

use super::CorpusError;
use crate::preprocess::decode_latin1;

/// Smallest accepted memory budget, in bytes.
pub const MIN_SORT_BUDGET: usize = 4096;

/// Runs merged at once; bounds open file handles.
const FAN_IN: usize = 16;

/// Bookkeeping cost charged per buffered record on top of its bytes.
const RECORD_OVERHEAD: usize = std::mem::size_of::<Vec<u8>>();

/// Lines of `input` occurring at least `threshold` times, as
/// `(count, line)` sorted by line bytes, using about `budget` bytes of
/// record memory. Temporary runs go to `tmp_dir` (system default if `None`).
pub fn external_sort_count(
    input: &Path,
    threshold: u64,
    budget: usize,
    tmp_dir: Option<&Path>,
) -> Result<Vec<(u64, String)>, CorpusError> {
    if budget < MIN_SORT_BUDGET {
        return Err(CorpusError::Config(format!(
            "sort budget of {budget} bytes is below the minimum run size of {MIN_SORT_BUDGET}"
        )));
    }
    let file = File::open(input).map_err(|e| CorpusError::io(input, e))?;
    let mut reader = BufReader::new(file);
    let spill_dir = match tmp_dir {
        Some(d) => TempDir::new_in(d),
        None => TempDir::new(),
    }
    .map_err(|e| CorpusError::io(tmp_dir.unwrap_or(Path::new(".")), e))?;

    let mut runs: Vec<NamedTempFile> = Vec::new();
    let mut chunk: Vec<Vec<u8>> = Vec::new();
    let mut used = 0usize;
    loop {
        let mut rec = Vec::new();
        let n = reader
            .read_until(b'\n', &mut rec)
            .map_err(|e| CorpusError::io(input, e))?;
        if n == 0 {
            break;
        }
        if rec.last() == Some(&b'\n') {
            rec.pop();
        }
        used += rec.len() + RECORD_OVERHEAD;
        chunk.push(rec);
        if used >= budget {
            runs.push(spill(&mut chunk, spill_dir.path())?);
            used = 0;
        }
    }

    let mut out = Vec::new();
    let mut emit = |count: u64, rec: &[u8]| {
        if count >= threshold {
            out.push((count, decode_latin1(rec)));
        }
    };

    if runs.is_empty() {
        chunk.sort_unstable();
        count_sorted(chunk.iter().map(|r| Ok(r.clone())), &mut emit)?;
        return Ok(out);
    }
    if !chunk.is_empty() {
        runs.push(spill(&mut chunk, spill_dir.path())?);
    }
    while runs.len() > FAN_IN {
        let mut next = Vec::new();
        for group in runs.chunks(FAN_IN) {
            let mut merged = NamedTempFile::new_in(spill_dir.path())
                .map_err(|e| CorpusError::io(spill_dir.path(), e))?;
            {
                let mut w = BufWriter::new(merged.as_file_mut());
                for rec in merge_runs(group)? {
                    let rec = rec?;
                    w.write_all(&rec).and_then(|_| w.write_all(b"\n"))
                        .map_err(|e| CorpusError::io(spill_dir.path(), e))?;
                }
                w.flush().map_err(|e| CorpusError::io(spill_dir.path(), e))?;
            }
            next.push(merged);
        }
        runs = next;
    }
    count_sorted(merge_runs(&runs)?, &mut emit)?;
    Ok(out)
}

fn spill(chunk: &mut Vec<Vec<u8>>, dir: &Path) -> Result<NamedTempFile, CorpusError> {
    chunk.sort_unstable();
    let mut run = NamedTempFile::new_in(dir).map_err(|e| CorpusError::io(dir, e))?;
    {
        let mut w = BufWriter::new(run.as_file_mut());
        for rec in chunk.drain(..) {
            w.write_all(&rec)
                .and_then(|_| w.write_all(b"\n"))
                .map_err(|e| CorpusError::io(dir, e))?;
        }
        w.flush().map_err(|e| CorpusError::io(dir, e))?;
    }
    Ok(run)
}

/// Collapses a sorted record stream into `(count, record)` pairs.
fn count_sorted<I, F>(records: I, emit: &mut F) -> Result<(), CorpusError>
where
    I: Iterator<Item = Result<Vec<u8>, CorpusError>>,
    F: FnMut(u64, &[u8]),
{
    let mut current: Option<(Vec<u8>, u64)> = None;
    for rec in records {
        let rec = rec?;
        match &mut current {
            Some((prev, n)) if *prev == rec => *n += 1,
            _ => {
                if let Some((prev, n)) = current.take() {
                    emit(n, &prev);
                }
                current = Some((rec, 1));
            }
        }
    }
    if let Some((prev, n)) = current {
        emit(n, &prev);
    }
    Ok(())
}

struct RunReader {
    reader: BufReader<File>,
    path: std::path::PathBuf,
}

impl RunReader {
    fn next_record(&mut self) -> Result<Option<Vec<u8>>, CorpusError> {
        let mut rec = Vec::new();
        let n = self
            .reader
            .read_until(b'\n', &mut rec)
            .map_err(|e| CorpusError::io(&self.path, e))?;
        if n == 0 {
            return Ok(None);
        }
        rec.pop();
        Ok(Some(rec))
    }
}

struct Merge {
    readers: Vec<RunReader>,
    heap: BinaryHeap<Reverse<(Vec<u8>, usize)>>,
}

impl Iterator for Merge {
    type Item = Result<Vec<u8>, CorpusError>;

    fn next(&mut self) -> Option<Self::Item> {
        let Reverse((rec, idx)) = self.heap.pop()?;
        match self.readers[idx].next_record() {
            Ok(Some(next)) => self.heap.push(Reverse((next, idx))),
            Ok(None) => {}
            Err(e) => return Some(Err(e)),
        }
        Some(Ok(rec))
    }
}

fn merge_runs(runs: &[NamedTempFile]) -> Result<Merge, CorpusError> {
    let mut readers = Vec::with_capacity(runs.len());
    for run in runs {
        let file = run.reopen().map_err(|e| CorpusError::io(run.path(), e))?;
        readers.push(RunReader {
            reader: BufReader::new(file),
            path: run.path().to_path_buf(),
        });
    }
    let mut heap = BinaryHeap::new();
    for (idx, r) in readers.iter_mut().enumerate() {
        if let Some(rec) = r.next_record()? {
            heap.push(Reverse((rec, idx)));
        }
    }
    Ok(Merge { readers, heap })
}
