//! Direct-indexed array of small counters addressed by the low `k` bits of
//! a line's CRC-64.
//!
//! Counters saturate at `2^width - 1`. With Morris counting enabled a counter
//! holding `v` is incremented with probability `2^-v` and stands for an
//! estimated `2^v - 1` occurrences.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::crc64::LineKey;
use super::CounterError;

pub const DEFAULT_HASH_BITS: u32 = 23;
pub const DEFAULT_COUNTER_WIDTH: u32 = 8;
pub const MAX_HASH_BITS: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KBitConfig {
    pub hash_bits: u32,
    pub counter_width: u32,
    pub morris: bool,
    /// Seed of the random source driving Morris increments.
    pub seed: u64,
}

impl Default for KBitConfig {
    fn default() -> Self {
        Self {
            hash_bits: DEFAULT_HASH_BITS,
            counter_width: DEFAULT_COUNTER_WIDTH,
            morris: false,
            seed: 0,
        }
    }
}

impl KBitConfig {
    pub fn validate(&self) -> Result<(), CounterError> {
        if !(1..=MAX_HASH_BITS).contains(&self.hash_bits) {
            return Err(CounterError::Config(format!(
                "hash bits must be in 1..={MAX_HASH_BITS}, got {}",
                self.hash_bits
            )));
        }
        if !(1..=8).contains(&self.counter_width) {
            return Err(CounterError::Config(format!(
                "counter width must be in 1..=8 bits, got {}",
                self.counter_width
            )));
        }
        Ok(())
    }

    pub fn counters(&self) -> usize {
        1usize << self.hash_bits
    }

    pub fn max_value(&self) -> u8 {
        ((1u16 << self.counter_width) - 1) as u8
    }
}

/// Probabilistic increment: `counter + 1` when `uniform < 2^-counter`.
/// `uniform` is a sample from `[0, 1)`. Counters already at `max` stay put.
pub fn morris_increment(counter: u8, uniform: f64, max: u8) -> u8 {
    if counter >= max {
        return counter;
    }
    if uniform < (-f64::from(counter)).exp2() {
        counter + 1
    } else {
        counter
    }
}

/// Estimated number of increments represented by a Morris counter.
pub fn morris_estimate(counter: u8) -> f64 {
    f64::from(counter).exp2() - 1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KBitArray {
    config: KBitConfig,
    counters: Vec<u8>,
    #[serde(skip, default = "default_rng")]
    rng: ChaCha8Rng,
}

fn default_rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0)
}

impl KBitArray {
    pub fn new(config: KBitConfig) -> Result<Self, CounterError> {
        config.validate()?;
        Ok(Self {
            counters: vec![0; config.counters()],
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            config,
        })
    }

    pub fn config(&self) -> &KBitConfig {
        &self.config
    }

    pub fn slot(&self, key: LineKey) -> usize {
        key.low_bits(self.config.hash_bits)
    }

    pub fn record(&mut self, key: LineKey) {
        let slot = self.slot(key);
        let max = self.config.max_value();
        let c = self.counters[slot];
        self.counters[slot] = if self.config.morris {
            morris_increment(c, self.rng.gen::<f64>(), max)
        } else {
            c.saturating_add(1).min(max)
        };
    }

    pub fn raw(&self, key: LineKey) -> u8 {
        self.counters[self.slot(key)]
    }

    /// Count represented by the counter at `key`'s slot.
    pub fn estimate(&self, key: LineKey) -> f64 {
        let c = self.raw(key);
        if self.config.morris {
            morris_estimate(c)
        } else {
            f64::from(c)
        }
    }

    pub fn is_frequent(&self, key: LineKey, threshold: u32) -> bool {
        self.estimate(key) >= f64::from(threshold)
    }

    /// Element-wise saturating sum. For Morris counters the estimates are
    /// added and re-encoded, which is approximate.
    pub fn merge(&mut self, other: &KBitArray) -> Result<(), CounterError> {
        let (a, b) = (self.config, other.config);
        if (a.hash_bits, a.counter_width, a.morris) != (b.hash_bits, b.counter_width, b.morris) {
            return Err(CounterError::Merge(
                "k-bit arrays with different shapes".into(),
            ));
        }
        let max = self.config.max_value();
        let morris = self.config.morris;
        for (dst, &src) in self.counters.iter_mut().zip(&other.counters) {
            *dst = if morris {
                let total = morris_estimate(*dst) + morris_estimate(src);
                ((total + 1.0).log2().round() as u32).min(u32::from(max)) as u8
            } else {
                (u16::from(*dst) + u16::from(src)).min(u16::from(max)) as u8
            };
        }
        Ok(())
    }

    pub fn nonzero_counters(&self) -> usize {
        self.counters.iter().filter(|&&c| c > 0).count()
    }
}
