//! Command-line front end.
//!
//! Exit status: 0 on success, 1 on I/O failure, 2 on invalid configuration
//! or malformed input.

use std::collections::HashMap;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::analysis::{
    early_cut_probability, empirical_fp_rate, expected_overshoot, expected_run_time, fp_bound_crude,
    fp_bound_skewed, simulate_run_time, zipf_gm_efficiency, AnalysisError, FpBoundInput,
    OccurrenceHistogram, RunModel, TailWeighting, ZipfExperiment,
};
use crate::config::{ConfigError, ConfigOverrides, RunConfig};
use crate::corpus::{
    evaluate, external_sort_count, generate_synthetic, ingest, load_reports, read_spool,
    save_reports, synthetic_spool, write_synthetic, CorpusError, SyntheticSpec,
};
use crate::counters::{read_frequent_lines, write_frequent_lines, CounterError, FrequencyStore};
use crate::pipeline::{build_index, detect_all, thread_pool, PipelineError};

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Io(m) | CliError::Config(m) => m,
        }
    }
}

fn config_err(m: impl Into<String>) -> CliError {
    CliError::Config(m.into())
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io { .. } => CliError::Io(e.to_string()),
            ConfigError::Invalid(_) => CliError::Config(e.to_string()),
        }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::Io { .. } => CliError::Io(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<CounterError> for CliError {
    fn from(e: CounterError) -> Self {
        match e {
            CounterError::Io(_) => CliError::Io(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Io { .. } => CliError::Io(e.to_string()),
            PipelineError::Counter(c) => c.into(),
            PipelineError::Config(_) => CliError::Config(e.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        CliError::Config(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "boilerstrip", version, about = "Detect and strip boilerplate headers and footers in plain-text corpora")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pass 1 only: count window lines and save the index, spool or frequent-line list.
    Index(IndexArgs),
    /// Both passes: write a boundary report and optionally the stripped bodies.
    Strip(StripArgs),
    /// Score a boundary report against gold annotations.
    Evaluate(EvaluateArgs),
    /// Evaluate the error model and counting-structure formulas.
    #[command(subcommand)]
    Analyze(Analysis),
    /// Write a seeded synthetic corpus with gold annotations.
    Generate(GenerateArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// key=value configuration file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// exact, crc64, kbit or gm.
    #[arg(long)]
    pub backend: Option<String>,
    /// Minimum count K for a line to be frequent.
    #[arg(short = 'K', long)]
    pub threshold: Option<u32>,
    #[arg(long)]
    pub hash_bits: Option<u32>,
    #[arg(long)]
    pub counter_width: Option<u32>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub morris: Option<bool>,
    #[arg(long)]
    pub gm_counters: Option<usize>,
    #[arg(long)]
    pub gm_threshold: Option<u64>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub gm_store_keys: Option<bool>,
    #[arg(long)]
    pub gap_max: Option<usize>,
    #[arg(long)]
    pub p_max: Option<usize>,
    #[arg(long)]
    pub e_max: Option<usize>,
    #[arg(long)]
    pub min_len: Option<usize>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub heuristics: Option<bool>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(short = 'j', long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let flags = ConfigOverrides {
            corpus: self.corpus.clone(),
            backend: self.backend.clone(),
            threshold: self.threshold,
            hash_bits: self.hash_bits,
            counter_width: self.counter_width,
            morris: self.morris,
            gm_counters: self.gm_counters,
            gm_threshold: self.gm_threshold,
            gm_store_keys: self.gm_store_keys,
            gap_max: self.gap_max,
            p_max: self.p_max,
            e_max: self.e_max,
            min_len: self.min_len,
            heuristics: self.heuristics,
            output: self.out.clone(),
            workers: self.workers,
            seed: self.seed,
        };
        Ok(RunConfig::resolve(self.config.as_deref(), &flags)?)
    }
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Save the sealed store (binary).
    #[arg(long)]
    pub save_index: Option<PathBuf>,
    /// Write every window line, one per record.
    #[arg(long)]
    pub spool: Option<PathBuf>,
    /// Write the frequent lines as `count<TAB>line`.
    #[arg(long)]
    pub export_frequent: Option<PathBuf>,
    /// Count the spool with an external sort using this many bytes of
    /// memory, and export that result instead of the store's.
    #[arg(long, requires_all = ["spool", "export_frequent"])]
    pub sort_budget: Option<usize>,
}

#[derive(Debug, Args)]
pub struct StripArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Reuse a store saved by `--save-index` instead of running pass 1.
    #[arg(long, conflicts_with = "load_frequent")]
    pub load_index: Option<PathBuf>,
    /// Use an exported `count<TAB>line` list as the frequent set.
    #[arg(long)]
    pub load_frequent: Option<PathBuf>,
    #[arg(long)]
    pub save_index: Option<PathBuf>,
    #[arg(long)]
    pub spool: Option<PathBuf>,
    #[arg(long)]
    pub export_frequent: Option<PathBuf>,
    /// Also write stripped copies under `<out>/bodies`.
    #[arg(long)]
    pub write_bodies: bool,
    /// Report path; defaults to `<out>/reports.tsv`.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub reports: PathBuf,
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "0,5,10")]
    pub tolerances: Vec<u64>,
    /// Per-file signed errors CSV.
    #[arg(long)]
    pub per_file: Option<PathBuf>,
    /// Sorted error curves CSV.
    #[arg(long)]
    pub curves: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Analysis {
    /// Expected lines before a run of n successes; columns
    /// p,n,expected_run_time,simulated_run_time,early_cut_bound.
    Prop1 {
        #[arg(long, value_delimiter = ',', default_value = "0.25")]
        p: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "10")]
        n: Vec<u32>,
        /// Monte-Carlo trials; 0 skips the simulation column.
        #[arg(long, default_value_t = 0)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Lines scanned, for the early-cut bound.
        #[arg(long, default_value_t = 300)]
        len: u32,
    },
    /// Expected body lines kept past the preamble; columns p_fp,gap_max,expected_overshoot.
    Overshoot {
        #[arg(long, value_delimiter = ',', default_value = "0,0.05,0.1,0.15,0.2,0.25,0.3,0.35,0.4,0.45,0.5")]
        p: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "10")]
        gap_max: Vec<u32>,
    },
    /// Hashed-counter false-positive bounds, from parameters (n,c,p,...)
    /// or measured on a spool (c,K,empirical_fp_rate,...).
    FpBounds {
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        c: Option<u64>,
        #[arg(long, default_value_t = 0.001)]
        p: f64,
        #[arg(long)]
        spool: Option<PathBuf>,
        /// Measure on a seeded synthetic spool of this many lines.
        #[arg(long, conflicts_with = "spool")]
        synthetic_lines: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_value = "16,18,20,23")]
        hash_bits: Vec<u32>,
        #[arg(long, value_delimiter = ',', default_value = "10")]
        thresholds: Vec<u32>,
    },
    /// Occurrence histogram and tail; columns occurrences,lines,tail_probability.
    Histogram {
        #[arg(long)]
        spool: Option<PathBuf>,
        #[arg(long, conflicts_with = "spool")]
        synthetic_lines: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Pick lines uniformly among distinct lines rather than occurrences.
        #[arg(long)]
        distinct: bool,
    },
    /// GM exact top-k depth on Zipf streams; columns x,mean_efficiency.
    ZipfGm {
        #[arg(long, value_delimiter = ',', default_value = "0,0.5,1,1.5,2,2.5,3")]
        x: Vec<f64>,
        #[arg(long, default_value_t = 30)]
        counters: usize,
        #[arg(long, default_value_t = 30)]
        trials: u32,
        #[arg(long, default_value_t = 100_000)]
        items: u64,
        #[arg(long, default_value_t = 1000)]
        distinct: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 500)]
    pub files: usize,
    #[arg(long, default_value_t = 0.25)]
    pub mutation_rate: f64,
    #[arg(long, default_value_t = 0.9)]
    pub epilogue_probability: f64,
    #[arg(long, default_value_t = 400)]
    pub body_min: usize,
    #[arg(long, default_value_t = 1200)]
    pub body_max: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Gold annotation path; defaults to `<out>/gold.tsv`.
    #[arg(long)]
    pub gold: Option<PathBuf>,
}

/// Parses the process arguments, runs, and maps failures to exit codes.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = out.flush();
            eprintln!("boilerstrip: error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Index(a) => cmd_index(&a),
        Command::Strip(a) => cmd_strip(&a),
        Command::Evaluate(a) => cmd_evaluate(&a, out),
        Command::Analyze(a) => cmd_analyze(&a, out),
        Command::Generate(a) => cmd_generate(&a),
    }
}

fn require_corpus(cfg: &RunConfig) -> Result<&Path, CliError> {
    cfg.corpus
        .as_deref()
        .ok_or_else(|| config_err("no corpus given (use --corpus or set corpus in the config file)"))
}

fn save_store(store: &FrequencyStore, path: &Path) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    store.save(&mut w)?;
    w.flush()?;
    Ok(())
}

fn export_frequent(lines: &[(u64, String)], path: &Path) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    write_frequent_lines(BufWriter::new(file), lines)?;
    Ok(())
}

fn cmd_index(a: &IndexArgs) -> Result<(), CliError> {
    let cfg = a.run.resolve()?;
    if a.save_index.is_none() && a.spool.is_none() && a.export_frequent.is_none() {
        return Err(config_err("nothing to write: give --save-index, --spool or --export-frequent"));
    }
    let corpus = require_corpus(&cfg)?;
    let manifest = ingest(corpus)?;
    warn_skipped(manifest.skipped);
    let pool = thread_pool(cfg.workers)?;
    let started = Instant::now();
    let (store, stats) = build_index(
        &pool,
        &manifest,
        &cfg.backend_config(),
        cfg.threshold,
        &cfg.detector,
        a.spool.as_deref(),
    )?;
    eprintln!(
        "pass 1: {} files, {} window lines; read+normalize {:.3}s, structure build {:.3}s (worker sums), wall {:.3}s",
        stats.files,
        stats.lines_recorded,
        stats.read_time.as_secs_f64(),
        stats.build_time.as_secs_f64(),
        started.elapsed().as_secs_f64()
    );
    if let Some(p) = &a.save_index {
        save_store(&store, p)?;
    }
    if let Some(p) = &a.export_frequent {
        let lines = match (a.sort_budget, &a.spool) {
            (Some(budget), Some(spool)) => external_sort_count(spool, u64::from(cfg.threshold), budget, None)?,
            _ => store.frequent_lines()?,
        };
        export_frequent(&lines, p)?;
    }
    Ok(())
}

fn cmd_strip(a: &StripArgs) -> Result<(), CliError> {
    let cfg = a.run.resolve()?;
    let corpus = require_corpus(&cfg)?;
    let report_path = match (&a.report, &cfg.output) {
        (Some(r), _) => r.clone(),
        (None, Some(o)) => o.join("reports.tsv"),
        (None, None) => return Err(config_err("no output given (use --out or --report)")),
    };
    let bodies = match (a.write_bodies, &cfg.output) {
        (false, _) => None,
        (true, Some(o)) => Some(o.join("bodies")),
        (true, None) => return Err(config_err("--write-bodies needs --out")),
    };
    if (a.load_index.is_some() || a.load_frequent.is_some()) && a.spool.is_some() {
        return Err(config_err("--spool needs pass 1, which --load-index/--load-frequent skip"));
    }

    let manifest = ingest(corpus)?;
    warn_skipped(manifest.skipped);
    let pool = thread_pool(cfg.workers)?;

    let mut header = vec!["boilerstrip strip".to_string()];
    let store = if let Some(p) = &a.load_index {
        let file = File::open(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
        let store = FrequencyStore::load(BufReader::new(file))?;
        if !store.is_sealed() {
            return Err(config_err(format!("{}: index was not sealed", p.display())));
        }
        header.push("index=loaded".into());
        header.push(format!("backend={}", store.kind()));
        header.push(format!("threshold={}", store.threshold()));
        store
    } else if let Some(p) = &a.load_frequent {
        let file = File::open(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
        let lines = read_frequent_lines(BufReader::new(file))?;
        header.push("index=frequent-list".into());
        header.push(format!("threshold={}", cfg.threshold));
        FrequencyStore::from_frequent_lines(&lines, cfg.threshold)?
    } else {
        let started = Instant::now();
        let (store, stats) = build_index(
            &pool,
            &manifest,
            &cfg.backend_config(),
            cfg.threshold,
            &cfg.detector,
            a.spool.as_deref(),
        )?;
        eprintln!(
            "pass 1: {} files, {} window lines; read+normalize {:.3}s, structure build {:.3}s (worker sums), wall {:.3}s",
            stats.files,
            stats.lines_recorded,
            stats.read_time.as_secs_f64(),
            stats.build_time.as_secs_f64(),
            started.elapsed().as_secs_f64()
        );
        header.extend(cfg.backend_header());
        store
    };
    header.extend(cfg.detector_header());
    if store.is_approximate() || (a.load_index.is_none() && cfg.merge_is_approximate()) {
        header.push("approximate=true".into());
    }
    header.push(format!("files={}", manifest.len()));

    if let Some(p) = &a.save_index {
        save_store(&store, p)?;
    }
    if let Some(p) = &a.export_frequent {
        export_frequent(&store.frequent_lines()?, p)?;
    }

    let started = Instant::now();
    if let Some(b) = &bodies {
        fs::create_dir_all(b).map_err(|e| CliError::Io(format!("{}: {e}", b.display())))?;
    }
    let reports = detect_all(&pool, &manifest, &store, &cfg.detector, bodies.as_deref())?;
    eprintln!("pass 2: {} files in {:.3}s", reports.len(), started.elapsed().as_secs_f64());
    if let Some(parent) = report_path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
    }
    save_reports(&report_path, &header, &reports)?;
    Ok(())
}

fn warn_skipped(n: usize) {
    if n > 0 {
        eprintln!("warning: skipped {n} unreadable entries");
    }
}

fn cmd_evaluate(a: &EvaluateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let reports = load_reports(&a.reports)?;
    let gold = load_reports(&a.gold)?;
    let ev = evaluate(&reports, &gold)?;
    if let Some(p) = &a.per_file {
        fs::write(p, ev.per_file_csv()).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
    }
    if let Some(p) = &a.curves {
        fs::write(p, ev.curves_csv()).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
    }
    out.write_all(ev.summary_csv(&a.tolerances).as_bytes())?;
    Ok(())
}

fn spool_counts(spool: &Option<PathBuf>, synthetic: Option<usize>, seed: u64) -> Result<HashMap<String, u32>, CliError> {
    let lines = match (spool, synthetic) {
        (Some(p), _) => read_spool(p)?,
        (None, Some(n)) => synthetic_spool(n, seed),
        (None, None) => return Err(config_err("give --spool or --synthetic-lines")),
    };
    let mut counts: HashMap<String, u32> = HashMap::new();
    for l in lines {
        *counts.entry(l).or_default() += 1;
    }
    Ok(counts)
}

fn cmd_analyze(a: &Analysis, out: &mut dyn Write) -> Result<(), CliError> {
    let mut csv = String::new();
    match a {
        Analysis::Prop1 { p, n, trials, seed, len } => {
            csv.push_str("p,n,expected_run_time,simulated_run_time,early_cut_bound\n");
            for &p in p {
                for &n in n {
                    let m = RunModel::new(p, n)?;
                    let expected = expected_run_time(m)?;
                    let simulated = if *trials > 0 {
                        simulate_run_time(m, *trials, *seed)?.to_string()
                    } else {
                        "-".to_string()
                    };
                    let cut = early_cut_probability(p, *len, n)?;
                    csv.push_str(&format!("{p},{n},{expected},{simulated},{cut}\n"));
                }
            }
        }
        Analysis::Overshoot { p, gap_max } => {
            csv.push_str("p_fp,gap_max,expected_overshoot\n");
            for &p in p {
                for &g in gap_max {
                    csv.push_str(&format!("{p},{g},{}\n", expected_overshoot(p, g)?));
                }
            }
        }
        Analysis::FpBounds {
            n,
            c,
            p,
            spool,
            synthetic_lines,
            seed,
            hash_bits,
            thresholds,
        } => {
            if spool.is_some() || synthetic_lines.is_some() {
                let counts = spool_counts(spool, *synthetic_lines, *seed)?;
                let distinct = counts.len() as u64;
                csv.push_str("c,K,empirical_fp_rate,crude_bound,skewed_bound\n");
                for &bits in hash_bits {
                    for &k in thresholds {
                        let counters = 1u64 << bits.min(63);
                        let input = FpBoundInput {
                            n_distinct: distinct.max(1),
                            counters,
                            p_skew: *p,
                            threshold: k,
                        };
                        let rate = empirical_fp_rate(&counts, bits, k)?;
                        csv.push_str(&format!(
                            "{counters},{k},{rate},{},{}\n",
                            fp_bound_crude(&input)?,
                            fp_bound_skewed(&input)?
                        ));
                    }
                }
            } else {
                let (Some(n), Some(c)) = (n, c) else {
                    return Err(config_err("give --n and --c, or a spool to measure"));
                };
                let input = FpBoundInput {
                    n_distinct: *n,
                    counters: *c,
                    p_skew: *p,
                    threshold: thresholds.first().copied().unwrap_or(10),
                };
                csv.push_str("n,c,p,crude_bound,skewed_bound\n");
                csv.push_str(&format!(
                    "{n},{c},{p},{},{}\n",
                    fp_bound_crude(&input)?,
                    fp_bound_skewed(&input)?
                ));
            }
        }
        Analysis::Histogram {
            spool,
            synthetic_lines,
            seed,
            distinct,
        } => {
            let counts = spool_counts(spool, *synthetic_lines, *seed)?;
            let h = OccurrenceHistogram::from_map(&counts);
            let w = if *distinct {
                TailWeighting::Distinct
            } else {
                TailWeighting::Occurrence
            };
            csv.push_str("occurrences,lines,tail_probability\n");
            for (k, tail) in h.tail(w) {
                csv.push_str(&format!("{k},{},{tail}\n", h.bins[&k]));
            }
        }
        Analysis::ZipfGm {
            x,
            counters,
            trials,
            items,
            distinct,
            seed,
        } => {
            let rows: Result<Vec<(f64, f64)>, AnalysisError> = x
                .par_iter()
                .map(|&x| {
                    let e = ZipfExperiment {
                        x,
                        n_items: *items,
                        n_distinct: *distinct,
                        counters: *counters,
                        trials: *trials,
                        seed: *seed,
                    };
                    zipf_gm_efficiency(&e).map(|v| (x, v))
                })
                .collect();
            csv.push_str("x,mean_efficiency\n");
            for (x, v) in rows? {
                csv.push_str(&format!("{x},{v}\n"));
            }
        }
    }
    out.write_all(csv.as_bytes())?;
    Ok(())
}

fn cmd_generate(a: &GenerateArgs) -> Result<(), CliError> {
    let spec = SyntheticSpec {
        files: a.files,
        mutation_rate: a.mutation_rate,
        epilogue_probability: a.epilogue_probability,
        body_lines: (a.body_min, a.body_max),
        seed: a.seed,
        ..SyntheticSpec::default()
    };
    let corpus = generate_synthetic(&spec)?;
    fs::create_dir_all(&a.out).map_err(|e| CliError::Io(format!("{}: {e}", a.out.display())))?;
    write_synthetic(&corpus, &a.out)?;
    let gold = a.gold.clone().unwrap_or_else(|| a.out.join("gold.tsv"));
    let header = vec![
        "boilerstrip generate".to_string(),
        format!("files={}", a.files),
        format!("mutation_rate={}", a.mutation_rate),
        format!("epilogue_probability={}", a.epilogue_probability),
        format!("body_lines={}..={}", a.body_min, a.body_max),
        format!("seed={}", a.seed),
    ];
    save_reports(&gold, &header, &corpus.gold)?;
    Ok(())
}
