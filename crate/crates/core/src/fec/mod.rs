//! Channel coding: Hamming(7,4), Gray mapping of symbol indices and block
//! interleaving.

mod gray;
mod hamming;
mod interleave;

pub use gray::{gray_map, gray_unmap};
pub use hamming::{hamming_decode, hamming_encode, Codeword, CODEWORD_BITS, DATA_BITS};
pub use interleave::{deinterleave, interleave, InterleaverConfig};

use std::{fmt, str::FromStr};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitString;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FecError {
    #[error("index {index} out of range for {sf}-bit symbols")]
    IndexOutOfRange { index: u32, sf: u32 },
    #[error("interleaver expects {expected} bits, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("invalid interleaver shape {rows}x{cols}")]
    InvalidShape { rows: usize, cols: usize },
    #[error("coded block of {actual} bits is shorter than the {expected} bits required")]
    Truncated { expected: usize, actual: usize },
}

/// Coding mode label: `Cr0` sends raw codec bits, `Cr3` adds Hamming(7,4),
/// interleaving and Gray-mapped symbol indices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodingMode {
    Cr0,
    #[default]
    Cr3,
}

impl CodingMode {
    pub fn uses_gray(self) -> bool {
        self == CodingMode::Cr3
    }

    /// Wire code carried in the frame header.
    pub fn code(self) -> u8 {
        match self {
            CodingMode::Cr0 => 0,
            CodingMode::Cr3 => 3,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(CodingMode::Cr0),
            3 => Some(CodingMode::Cr3),
            _ => None,
        }
    }

    /// Length of the coded block for `payload_bits` input bits.
    pub fn coded_len(self, payload_bits: usize) -> usize {
        match self {
            CodingMode::Cr0 => payload_bits,
            CodingMode::Cr3 => payload_bits.div_ceil(DATA_BITS) * CODEWORD_BITS,
        }
    }
}

impl fmt::Display for CodingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CodingMode::Cr0 => "cr0",
            CodingMode::Cr3 => "cr3",
        })
    }
}

impl FromStr for CodingMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "cr0" | "0" => Ok(CodingMode::Cr0),
            "cr3" | "3" => Ok(CodingMode::Cr3),
            other => Err(format!("unknown coding mode {other:?} (expected cr0 or cr3)")),
        }
    }
}

/// Interleaver shape for `codewords` Hamming codewords: each row holds one
/// codeword, so column-major reads send bit `i` of every codeword together.
pub fn codeword_interleaver(codewords: usize) -> InterleaverConfig {
    InterleaverConfig { rows: codewords, cols: CODEWORD_BITS }
}

/// Hamming-encodes `bits` nibble by nibble (zero-padding the tail) and
/// interleaves the codewords.
pub fn hamming_block_encode(bits: &BitString) -> BitString {
    let mut padded = bits.clone();
    padded.pad_to_multiple(DATA_BITS);
    let n = padded.len() / DATA_BITS;
    let mut coded = BitString::with_capacity(n * CODEWORD_BITS);
    for i in 0..n {
        let nibble = padded.read_uint(i * DATA_BITS, DATA_BITS) as u8;
        coded.push_uint(hamming_encode(nibble).bits() as u64, CODEWORD_BITS);
    }
    if n == 0 {
        return coded;
    }
    interleave(&coded, codeword_interleaver(n)).expect("shape matches by construction")
}

/// Inverse of [`hamming_block_encode`]; returns the decoded bits truncated
/// to `payload_len` and the number of codewords the decoder altered.
pub fn hamming_block_decode(
    coded: &BitString,
    payload_len: usize,
) -> Result<(BitString, usize), FecError> {
    let n = payload_len.div_ceil(DATA_BITS);
    let need = n * CODEWORD_BITS;
    if coded.len() < need {
        return Err(FecError::Truncated { expected: need, actual: coded.len() });
    }
    if n == 0 {
        return Ok((BitString::new(), 0));
    }
    let mut block = coded.clone();
    block.truncate(need);
    let words = deinterleave(&block, codeword_interleaver(n))?;
    let mut out = BitString::with_capacity(n * DATA_BITS);
    let mut corrected = 0;
    for i in 0..n {
        let word = Codeword::from_bits(words.read_uint(i * CODEWORD_BITS, CODEWORD_BITS) as u8);
        let (data, fixed) = hamming_decode(word);
        corrected += fixed as usize;
        out.push_uint(data as u64, DATA_BITS);
    }
    out.truncate(payload_len);
    Ok((out, corrected))
}

/// Channel-codes codec bits for transmission. Gray mapping for `Cr3` is
/// applied later, on symbol indices, by the physical layer.
pub fn code_pipeline_encode(bits: &BitString, mode: CodingMode) -> BitString {
    match mode {
        CodingMode::Cr0 => bits.clone(),
        CodingMode::Cr3 => hamming_block_encode(bits),
    }
}

/// Decodes a received coded block back to `payload_len` codec bits.
/// Returns the bits and the count of corrected codewords.
pub fn code_pipeline_decode(
    coded: &BitString,
    mode: CodingMode,
    payload_len: usize,
) -> Result<(BitString, usize), FecError> {
    match mode {
        CodingMode::Cr0 => {
            if coded.len() < payload_len {
                return Err(FecError::Truncated { expected: payload_len, actual: coded.len() });
            }
            let mut out = coded.clone();
            out.truncate(payload_len);
            Ok((out, 0))
        }
        CodingMode::Cr3 => hamming_block_decode(coded, payload_len),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;
    use proptest::prelude::*;
    use rand::RngExt;

    #[test]
    fn cr0_is_identity() {
        let x = BitString::from_str_bits("1011001110").unwrap();
        let coded = code_pipeline_encode(&x, CodingMode::Cr0);
        assert_eq!(coded, x);
        assert_eq!(code_pipeline_decode(&coded, CodingMode::Cr0, 10).unwrap(), (x, 0));
    }

    #[test]
    fn cr3_lengths() {
        assert_eq!(CodingMode::Cr3.coded_len(5), 14);
        assert_eq!(CodingMode::Cr3.coded_len(8), 14);
        assert_eq!(CodingMode::Cr3.coded_len(0), 0);
        let x = BitString::from_str_bits("10110").unwrap();
        assert_eq!(code_pipeline_encode(&x, CodingMode::Cr3).len(), 14);
    }

    #[test]
    fn truncated_block_is_an_error() {
        let x = BitString::zeros(13);
        assert!(matches!(
            code_pipeline_decode(&x, CodingMode::Cr3, 5),
            Err(FecError::Truncated { expected: 14, actual: 13 })
        ));
    }

    #[test]
    fn mode_codes_round_trip() {
        for m in [CodingMode::Cr0, CodingMode::Cr3] {
            assert_eq!(CodingMode::from_code(m.code()), Some(m));
            assert_eq!(m.to_string().parse::<CodingMode>(), Ok(m));
        }
        assert_eq!(CodingMode::from_code(1), None);
    }

    #[test]
    fn interleaved_burst_hits_distinct_codewords() {
        // A burst shorter than the codeword count never puts two errors in
        // one codeword, wherever it starts.
        let payload = BitString::zeros(40);
        let coded = code_pipeline_encode(&payload, CodingMode::Cr3);
        let rows = 10;
        for start in 0..coded.len() - rows {
            let mut rx = coded.clone();
            for i in start..start + rows {
                rx.flip(i);
            }
            let (out, corrected) = code_pipeline_decode(&rx, CodingMode::Cr3, 40).unwrap();
            assert_eq!(out, payload, "burst at {start}");
            assert_eq!(corrected, rows);
        }
    }

    #[test]
    fn cr3_lowers_bit_error_rate_at_one_percent() {
        // Residual word-failure oracle: P(>=2 errors in 7) = 1-(1-p)^7-7p(1-p)^6.
        let p: f64 = 0.01;
        let word_fail = 1.0 - (1.0 - p).powi(7) - 7.0 * p * (1.0 - p).powi(6);
        assert!((word_fail - 0.002_031).abs() < 1e-5);

        let mut rng = seed::rng(99);
        let n_bits = 1_000_000;
        let payload: BitString = (0..n_bits).map(|_| rng.random_bool(0.5)).collect();
        let mut run = |mode| {
            let mut coded = code_pipeline_encode(&payload, mode);
            for i in 0..coded.len() {
                if rng.random_bool(p) {
                    coded.flip(i);
                }
            }
            let (out, _) = code_pipeline_decode(&coded, mode, n_bits).unwrap();
            out.hamming_distance(&payload) as f64 / n_bits as f64
        };
        let ber0 = run(CodingMode::Cr0);
        let ber3 = run(CodingMode::Cr3);
        assert!((ber0 - p).abs() < 0.0005, "cr0 {ber0}");
        // A failed word costs at most 4 data bits and at least 1.
        assert!(ber3 < word_fail, "cr3 {ber3}");
        assert!(ber3 > word_fail / 4.0 * 0.8, "cr3 {ber3}");
        assert!(ber3 < ber0);
    }

    proptest! {
        #[test]
        fn noiseless_round_trip(v in proptest::collection::vec(any::<bool>(), 0..400)) {
            let x = BitString::from(v);
            for mode in [CodingMode::Cr0, CodingMode::Cr3] {
                let coded = code_pipeline_encode(&x, mode);
                prop_assert_eq!(coded.len(), mode.coded_len(x.len()));
                let (out, corrected) = code_pipeline_decode(&coded, mode, x.len()).unwrap();
                prop_assert_eq!(&out, &x);
                prop_assert_eq!(corrected, 0);
            }
        }
    }
}
