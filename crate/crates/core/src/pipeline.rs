//! The two corpus passes over a fixed-size worker pool.
//!
//! Pass 1 splits the manifest into contiguous shards, one per worker, builds
//! a store per shard and merges them in shard order. For Exact, Crc64Map and
//! plain k-bit stores the merge is associative, so the result does not depend
//! on the worker count. Pass 2 is embarrassingly parallel and keeps manifest
//! order.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use rayon::ThreadPool;
use tempfile::NamedTempFile;
use thiserror::Error;

use crate::corpus::{CorpusManifest, FileEntry};
use crate::counters::{BackendConfig, CounterError, FrequencyStore};
use crate::detector::{detect, strip, BoundaryReport, DetectorConfig};
use crate::preprocess::{encode_latin1, extract_window_with, split_lines};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Counter(#[from] CounterError),
    #[error("invalid configuration: {0}")]
    Config(String),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn thread_pool(workers: usize) -> Result<ThreadPool, PipelineError> {
    if workers == 0 {
        return Err(PipelineError::Config("worker count must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| PipelineError::Config(e.to_string()))
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IndexStats {
    pub files: usize,
    pub lines_recorded: u64,
    /// Reading, splitting and normalizing, summed over workers.
    pub read_time: Duration,
    /// Recording into the stores plus the final merge.
    pub build_time: Duration,
}

struct Shard {
    store: FrequencyStore,
    lines: u64,
    read_time: Duration,
    build_time: Duration,
    spool: Option<NamedTempFile>,
}

fn shard_config(config: &BackendConfig, shard: usize) -> BackendConfig {
    match config {
        BackendConfig::KBitArray(k) if k.morris => {
            let mut k = *k;
            k.seed = k.seed.wrapping_add(shard as u64);
            BackendConfig::KBitArray(k)
        }
        other => other.clone(),
    }
}

fn build_shard(
    files: &[FileEntry],
    config: BackendConfig,
    threshold: u32,
    detector: &DetectorConfig,
    spool_dir: Option<&Path>,
) -> Result<Shard, PipelineError> {
    let mut store = FrequencyStore::new(config, threshold)?;
    let mut spool = match spool_dir {
        Some(dir) => Some(NamedTempFile::new_in(dir).map_err(io_err(dir))?),
        None => None,
    };
    let mut writer = spool.as_mut().map(|f| BufWriter::new(f.as_file_mut()));
    let mut lines = 0;
    let mut read_time = Duration::ZERO;
    let mut build_time = Duration::ZERO;
    for entry in files {
        let t0 = Instant::now();
        let bytes = fs::read(&entry.path).map_err(io_err(&entry.path))?;
        let raw = split_lines(&bytes);
        let window = extract_window_with(&raw, detector.p_max, detector.e_max, detector.min_len);
        let t1 = Instant::now();
        for line in window.lines() {
            store.record(&line.text)?;
            lines += 1;
        }
        let t2 = Instant::now();
        if let Some(w) = writer.as_mut() {
            for line in window.lines() {
                w.write_all(&encode_latin1(&line.text))
                    .and_then(|_| w.write_all(b"\n"))
                    .map_err(io_err(spool_dir.unwrap_or(Path::new("."))))?;
            }
        }
        read_time += t1 - t0;
        build_time += t2 - t1;
    }
    if let Some(w) = writer.as_mut() {
        w.flush().map_err(io_err(spool_dir.unwrap_or(Path::new("."))))?;
    }
    drop(writer);
    Ok(Shard {
        store,
        lines,
        read_time,
        build_time,
        spool,
    })
}

fn shards(n_files: usize, workers: usize) -> Vec<std::ops::Range<usize>> {
    let n = workers.min(n_files).max(1);
    (0..n)
        .map(|i| (i * n_files / n)..((i + 1) * n_files / n))
        .collect()
}

/// Pass 1. Returns a sealed store. When `spool` is given, every window line
/// is also written there in manifest order.
pub fn build_index(
    pool: &ThreadPool,
    manifest: &CorpusManifest,
    config: &BackendConfig,
    threshold: u32,
    detector: &DetectorConfig,
    spool: Option<&Path>,
) -> Result<(FrequencyStore, IndexStats), PipelineError> {
    let spool_dir = spool.map(|p| match p.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    });
    let ranges = shards(manifest.files.len(), pool.current_num_threads());
    let results: Vec<Result<Shard, PipelineError>> = pool.install(|| {
        ranges
            .par_iter()
            .enumerate()
            .map(|(i, r)| {
                build_shard(
                    &manifest.files[r.clone()],
                    shard_config(config, i),
                    threshold,
                    detector,
                    spool_dir.as_deref(),
                )
            })
            .collect()
    });

    let mut stats = IndexStats {
        files: manifest.files.len(),
        ..IndexStats::default()
    };
    let mut merged: Option<FrequencyStore> = None;
    let mut spools = Vec::new();
    for shard in results {
        let shard = shard?;
        stats.lines_recorded += shard.lines;
        stats.read_time += shard.read_time;
        stats.build_time += shard.build_time;
        spools.extend(shard.spool);
        let t = Instant::now();
        match merged.as_mut() {
            None => merged = Some(shard.store),
            Some(m) => m.merge(shard.store)?,
        }
        stats.build_time += t.elapsed();
    }
    let mut store = match merged {
        Some(s) => s,
        None => FrequencyStore::new(config.clone(), threshold)?,
    };
    store.seal();

    if let Some(path) = spool {
        let mut out = BufWriter::new(File::create(path).map_err(io_err(path))?);
        for part in spools {
            let mut f = part.reopen().map_err(io_err(part.path()))?;
            io::copy(&mut f, &mut out).map_err(io_err(path))?;
        }
        out.flush().map_err(io_err(path))?;
    }
    Ok((store, stats))
}

/// Pass 2. Reports come back in manifest order. With `bodies`, the stripped
/// text of each file is written under that directory at the file's id.
pub fn detect_all(
    pool: &ThreadPool,
    manifest: &CorpusManifest,
    store: &FrequencyStore,
    detector: &DetectorConfig,
    bodies: Option<&Path>,
) -> Result<Vec<BoundaryReport>, PipelineError> {
    pool.install(|| {
        manifest
            .files
            .par_iter()
            .map(|entry| {
                let bytes = fs::read(&entry.path).map_err(io_err(&entry.path))?;
                let lines = split_lines(&bytes);
                let report = detect(&entry.id, &lines, store, detector);
                if let Some(dir) = bodies {
                    let path = dir.join(&entry.id);
                    if let Some(parent) = path.parent() {
                        fs::create_dir_all(parent).map_err(io_err(parent))?;
                    }
                    let mut body = Vec::new();
                    for l in strip(&lines, &report) {
                        body.extend_from_slice(&encode_latin1(&l.text));
                        body.push(b'\n');
                    }
                    fs::write(&path, body).map_err(io_err(&path))?;
                }
                Ok(report)
            })
            .collect()
    })
}
