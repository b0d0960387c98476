//! CRC-64/ECMA-182: polynomial 0x42F0E1EBA9EA3693, MSB-first, init 0,
//! no output xor. Check value for `"123456789"` is `0x6C40DF5F0B497347`.

use std::fmt;

use serde::{Deserialize, Serialize};

pub const POLY: u64 = 0x42F0_E1EB_A9EA_3693;

static TABLE: [u64; 256] = {
    let mut table = [0u64; 256];
    let mut i = 0;
    while i < 256 {
        let mut crc = (i as u64) << 56;
        let mut bit = 0;
        while bit < 8 {
            crc = if crc & (1 << 63) != 0 {
                (crc << 1) ^ POLY
            } else {
                crc << 1
            };
            bit += 1;
        }
        table[i] = crc;
        i += 1;
    }
    table
};

/// 64-bit identity of a normalized line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LineKey(pub u64);

impl LineKey {
    pub fn of(text: &str) -> Self {
        LineKey(crc64(text.as_bytes()))
    }

    /// Low `bits` bits of the checksum, used as a direct array index.
    pub fn low_bits(self, bits: u32) -> usize {
        if bits >= 64 {
            self.0 as usize
        } else {
            (self.0 & ((1u64 << bits) - 1)) as usize
        }
    }
}

impl fmt::Display for LineKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

/// Continues a checksum over more bytes.
pub fn update(mut crc: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        crc = TABLE[((crc >> 56) as u8 ^ b) as usize] ^ (crc << 8);
    }
    crc
}

pub fn crc64(bytes: &[u8]) -> u64 {
    update(0, bytes)
}
