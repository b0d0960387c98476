//! Closed forms and simulations for the error model of the detector and the
//! counting structures.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::counters::GeneralizedMajority;

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("probability {0} is outside the allowed range")]
    Probability(f64),
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

/// Independent Bernoulli trials with success probability `p`, waiting for
/// `n` successes in a row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunModel {
    pub p: f64,
    pub n: u32,
}

impl RunModel {
    pub fn new(p: f64, n: u32) -> Result<Self, AnalysisError> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(AnalysisError::Probability(p));
        }
        if n == 0 {
            return Err(AnalysisError::Parameter("run length must be at least 1".into()));
        }
        Ok(Self { p, n })
    }
}

/// Expected number of trials until `n` consecutive successes:
/// `sum_{i=1..n} p^-i`, accumulated from the smallest term up.
pub fn expected_run_time(m: RunModel) -> Result<f64, AnalysisError> {
    let m = RunModel::new(m.p, m.n)?;
    let inv = 1.0 / m.p;
    let mut term = 1.0;
    let mut sum = 0.0;
    for _ in 0..m.n {
        term *= inv;
        sum += term;
    }
    Ok(sum)
}

/// Monte-Carlo mean of the waiting time, one independent stream per seed.
pub fn simulate_run_time(m: RunModel, trials: u64, seed: u64) -> Result<f64, AnalysisError> {
    let m = RunModel::new(m.p, m.n)?;
    if trials == 0 {
        return Err(AnalysisError::Parameter("trials must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0u64;
    for _ in 0..trials {
        let mut flips = 0u64;
        let mut run = 0;
        while run < m.n {
            flips += 1;
            if rng.gen::<f64>() < m.p {
                run += 1;
            } else {
                run = 0;
            }
        }
        total += flips;
    }
    Ok(total as f64 / trials as f64)
}

/// Expected number of body lines absorbed into the preamble when every
/// body line is independently a false positive with probability `p_fp`.
pub fn expected_overshoot(p_fp: f64, gap_max: u32) -> Result<f64, AnalysisError> {
    if !(0.0..1.0).contains(&p_fp) {
        return Err(AnalysisError::Probability(p_fp));
    }
    if gap_max == 0 {
        return Ok(0.0);
    }
    let sum = expected_run_time(RunModel::new(1.0 - p_fp, gap_max)?)?;
    Ok(sum - f64::from(gap_max))
}

/// Union bound on cutting a preamble of `len` lines short when boilerplate
/// lines are independently missed with probability `sigma`.
pub fn early_cut_probability(sigma: f64, len: u32, gap_max: u32) -> Result<f64, AnalysisError> {
    if !(0.0..=1.0).contains(&sigma) {
        return Err(AnalysisError::Probability(sigma));
    }
    let gap = i32::try_from(gap_max).map_err(|_| AnalysisError::Parameter("gap_max too large".into()))?;
    Ok(f64::from(len) * sigma.powi(gap))
}

/// Parameters of the hashed-counter false-positive bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FpBoundInput {
    /// Number of distinct lines.
    pub n_distinct: u64,
    /// Number of counters.
    pub counters: u64,
    /// Probability that a colliding line alone exceeds the threshold.
    pub p_skew: f64,
    pub threshold: u32,
}

impl FpBoundInput {
    fn validate(&self) -> Result<(), AnalysisError> {
        if self.n_distinct == 0 || self.counters == 0 {
            return Err(AnalysisError::Parameter(
                "need at least one distinct line and one counter".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.p_skew) {
            return Err(AnalysisError::Probability(self.p_skew));
        }
        Ok(())
    }
}

/// Probability that a line shares its counter with any other line:
/// `1 - exp(-(n-1)/c)`.
pub fn fp_bound_crude(input: &FpBoundInput) -> Result<f64, AnalysisError> {
    input.validate()?;
    let lambda = (input.n_distinct - 1) as f64 / input.counters as f64;
    Ok(-(-lambda).exp_m1())
}

/// Bound for heavily skewed counts: `p (n-1)/c`.
pub fn fp_bound_skewed(input: &FpBoundInput) -> Result<f64, AnalysisError> {
    input.validate()?;
    Ok(input.p_skew * (input.n_distinct - 1) as f64 / input.counters as f64)
}

/// How a line is picked when reading the tail distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TailWeighting {
    /// Uniformly among all recorded occurrences.
    #[default]
    Occurrence,
    /// Uniformly among distinct lines.
    Distinct,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OccurrenceHistogram {
    /// occurrence count -> number of distinct lines with that count
    pub bins: BTreeMap<u64, u64>,
    pub distinct: u64,
    pub occurrences: u64,
}

impl OccurrenceHistogram {
    pub fn from_counts<I: IntoIterator<Item = u64>>(counts: I) -> Self {
        let mut h = Self::default();
        for c in counts.into_iter().filter(|&c| c > 0) {
            *h.bins.entry(c).or_default() += 1;
            h.distinct += 1;
            h.occurrences += c;
        }
        h
    }

    pub fn from_map<K>(map: &HashMap<K, u32>) -> Self {
        Self::from_counts(map.values().map(|&c| u64::from(c)))
    }

    /// `P(X >= k)` for every populated `k`, in increasing `k`.
    pub fn tail(&self, weighting: TailWeighting) -> Vec<(u64, f64)> {
        let weight = |k: u64, lines: u64| match weighting {
            TailWeighting::Occurrence => k * lines,
            TailWeighting::Distinct => lines,
        };
        let total: u64 = self.bins.iter().map(|(&k, &l)| weight(k, l)).sum();
        let mut remaining = total;
        let mut out = Vec::with_capacity(self.bins.len());
        for (&k, &lines) in &self.bins {
            out.push((k, remaining as f64 / total as f64));
            remaining -= weight(k, lines);
        }
        out
    }

    /// `P(X >= k)` for an arbitrary `k`.
    pub fn tail_at(&self, k: u64, weighting: TailWeighting) -> f64 {
        if self.distinct == 0 {
            return 0.0;
        }
        let (num, den) = match weighting {
            TailWeighting::Occurrence => (
                self.bins.range(k..).map(|(c, l)| c * l).sum::<u64>(),
                self.occurrences,
            ),
            TailWeighting::Distinct => (self.bins.range(k..).map(|(_, l)| l).sum::<u64>(), self.distinct),
        };
        num as f64 / den as f64
    }
}

/// Share of line occurrences that a hashed counter array with `2^bits`
/// saturating counters wrongly reports as frequent at threshold `k`, given
/// the exact per-line counts.
pub fn empirical_fp_rate<S: AsRef<str>>(counts: &HashMap<S, u32>, bits: u32, k: u32) -> Result<f64, AnalysisError> {
    if !(1..=32).contains(&bits) {
        return Err(AnalysisError::Parameter(format!("hash bits {bits} outside 1..=32")));
    }
    let mut slots: HashMap<usize, u64> = HashMap::new();
    let keyed: Vec<(usize, u32)> = counts
        .iter()
        .map(|(line, &c)| (crate::counters::line_key(line.as_ref()).low_bits(bits), c))
        .collect();
    for &(slot, c) in &keyed {
        *slots.entry(slot).or_default() += u64::from(c);
    }
    let total: u64 = keyed.iter().map(|&(_, c)| u64::from(c)).sum();
    if total == 0 {
        return Ok(0.0);
    }
    let wrong: u64 = keyed
        .iter()
        .filter(|&&(slot, c)| c < k && slots[&slot] >= u64::from(k))
        .map(|&(_, c)| u64::from(c))
        .sum();
    Ok(wrong as f64 / total as f64)
}

/// Item counts of a Zipf-like stream: rank `r` (1-based) gets
/// `round(n_items * w_r)` copies with `w_r` proportional to `r^-x`.
pub fn zipf_quotas(x: f64, n_items: u64, n_distinct: usize) -> Vec<u64> {
    let weights: Vec<f64> = (1..=n_distinct).map(|r| (r as f64).powf(-x)).collect();
    let norm: f64 = weights.iter().sum();
    weights
        .iter()
        .map(|w| (n_items as f64 * w / norm).round() as u64)
        .collect()
}

/// Largest `k <= c` such that GM's top-`k` answer is exactly the set of the
/// `k` most frequent items. A `k` only counts when that set is unique, i.e.
/// the `k`-th and `(k+1)`-th true frequencies differ.
pub fn exact_top_k(true_counts: &[u64], gm: &GeneralizedMajority<u32>) -> usize {
    let mut order: Vec<u64> = true_counts.to_vec();
    order.sort_unstable_by(|a, b| b.cmp(a));
    let top = gm.top(gm.capacity());
    let mut best = 0;
    let mut min_in = u64::MAX;
    for (k, (item, _)) in top.iter().enumerate() {
        let k = k + 1;
        let item = *item as usize;
        min_in = min_in.min(true_counts[item]);
        let kth = order[k - 1];
        let next = order.get(k).copied().unwrap_or(0);
        // The answer set has the right size; it is the true top-k when all
        // its members are at least the k-th frequency and that frequency is
        // strictly above the next one.
        if kth > next && min_in >= kth {
            best = k;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZipfExperiment {
    pub x: f64,
    pub n_items: u64,
    pub n_distinct: usize,
    pub counters: usize,
    pub trials: u32,
    pub seed: u64,
}

impl Default for ZipfExperiment {
    fn default() -> Self {
        Self {
            x: 1.0,
            n_items: 100_000,
            n_distinct: 1000,
            counters: 30,
            trials: 30,
            seed: 0,
        }
    }
}

/// Mean GM efficiency (exact top-k depth over counter budget) across
/// shuffled Zipf streams. Trial `t` is shuffled with seed `seed + t`.
pub fn zipf_gm_efficiency(e: &ZipfExperiment) -> Result<f64, AnalysisError> {
    if e.counters == 0 || e.counters > e.n_distinct {
        return Err(AnalysisError::Parameter(
            "need 1 <= counters <= distinct items".into(),
        ));
    }
    if e.trials == 0 {
        return Err(AnalysisError::Parameter("trials must be at least 1".into()));
    }
    if !e.x.is_finite() || e.x < 0.0 {
        return Err(AnalysisError::Parameter(format!("bad exponent {}", e.x)));
    }
    let quotas = zipf_quotas(e.x, e.n_items, e.n_distinct);
    let base: Vec<u32> = quotas
        .iter()
        .enumerate()
        .flat_map(|(i, &q)| std::iter::repeat(i as u32).take(q as usize))
        .collect();
    let mut total = 0.0;
    for t in 0..e.trials {
        let mut stream = base.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(e.seed.wrapping_add(u64::from(t)));
        stream.shuffle(&mut rng);
        let mut gm = GeneralizedMajority::new(e.counters);
        for item in &stream {
            gm.offer(item);
        }
        total += exact_top_k(&quotas, &gm) as f64 / e.counters as f64;
    }
    Ok(total / f64::from(e.trials))
}
