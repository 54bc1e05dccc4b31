//! Bit-flip corruption of encoded messages and corpus generation.

use std::io::{BufRead, Write};

use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{
    bits::BitString,
    context::PurposeTag,
    corpus::LabeledMessage,
    fec::{self, CodingMode},
    par::{self, Execution},
    seed,
    textcodec::{self, CodecError, SymbolAlphabet, BITS_PER_CHAR},
};

#[derive(Debug, Error, PartialEq)]
pub enum CorruptionError {
    #[error("bit error rate {0} is outside [0, 1]")]
    InvalidBer(f64),
    #[error("no messages or BER values to build a corpus from")]
    EmptyInput,
    #[error(transparent)]
    Codec(#[from] CodecError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorruptionSpec {
    pub ber: f64,
    pub protect_separators: bool,
    pub seed: u64,
}

impl CorruptionSpec {
    pub fn new(ber: f64, protect_separators: bool, seed: u64) -> Result<Self, CorruptionError> {
        let s = Self { ber, protect_separators, seed };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), CorruptionError> {
        if (0.0..=1.0).contains(&self.ber) {
            Ok(())
        } else {
            Err(CorruptionError::InvalidBer(self.ber))
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    #[default]
    MessageRecovery,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub original: String,
    pub corrupted: String,
    pub ber: f64,
    pub purpose: PurposeTag,
    pub task: Task,
}

impl CorpusRecord {
    /// The corrupted text with its purpose prepended, as fed to a recoverer
    /// that takes a single string.
    pub fn prompt(&self) -> String {
        format!("{}: {}", self.purpose, self.corrupted)
    }
}

/// Result of corrupting one message, with the raw flip count before any
/// separator repair.
#[derive(Clone, Debug, PartialEq)]
pub struct Corrupted {
    pub text: String,
    pub bits: usize,
    pub flips: usize,
}

fn flip_bits<R: Rng>(bits: &mut BitString, ber: f64, rng: &mut R) -> usize {
    let mut flips = 0;
    for i in 0..bits.len() {
        if rng.random_bool(ber) {
            bits.flip(i);
            flips += 1;
        }
    }
    flips
}

/// Puts spaces back where `original` had them and replaces spurious spaces
/// with a uniformly drawn non-space symbol.
fn repair_separators<R: Rng>(original: &str, corrupted: &str, alphabet: &SymbolAlphabet, rng: &mut R) -> String {
    let space = alphabet.space_index();
    original
        .chars()
        .zip(corrupted.chars())
        .map(|(o, c)| {
            if o == ' ' {
                ' '
            } else if c == ' ' {
                let mut k = rng.random_range(0..31u8);
                if k >= space {
                    k += 1;
                }
                alphabet.char_at(k)
            } else {
                c
            }
        })
        .collect()
}

pub fn corrupt_detailed(
    msg: &str,
    spec: &CorruptionSpec,
    alphabet: &SymbolAlphabet,
) -> Result<Corrupted, CorruptionError> {
    spec.validate()?;
    let mut bits = textcodec::encode_text(msg, alphabet)?;
    let mut rng = seed::derived_rng(spec.seed, seed::stream::CORRUPTION, 0);
    let flips = flip_bits(&mut bits, spec.ber, &mut rng);
    let mut text = textcodec::decode_bits(&bits, alphabet);
    if spec.protect_separators {
        text = repair_separators(msg, &text, alphabet, &mut rng);
    }
    Ok(Corrupted { text, bits: bits.len(), flips })
}

/// Flips each bit of the 5-bit encoding of `msg` independently with
/// probability `spec.ber`.
pub fn corrupt_message(msg: &str, spec: &CorruptionSpec, alphabet: &SymbolAlphabet) -> Result<String, CorruptionError> {
    Ok(corrupt_detailed(msg, spec, alphabet)?.text)
}

/// Like [`corrupt_message`], but the flips hit the channel-coded bits, which
/// are then decoded. Models the residual errors left by `mode` at a given
/// coded-bit error rate.
pub fn corrupt_coded(
    msg: &str,
    spec: &CorruptionSpec,
    mode: CodingMode,
    alphabet: &SymbolAlphabet,
) -> Result<String, CorruptionError> {
    spec.validate()?;
    let bits = textcodec::encode_text(msg, alphabet)?;
    let mut coded = fec::code_pipeline_encode(&bits, mode);
    let mut rng = seed::derived_rng(spec.seed, seed::stream::CORRUPTION, 0);
    flip_bits(&mut coded, spec.ber, &mut rng);
    let (decoded, _) = fec::code_pipeline_decode(&coded, mode, bits.len()).expect("coded length is consistent");
    let mut text = textcodec::decode_bits(&decoded, alphabet);
    if spec.protect_separators {
        text = repair_separators(msg, &text, alphabet, &mut rng);
    }
    Ok(text)
}

/// BER values 0.00, 0.01, ..., 0.20.
pub fn default_ber_grid() -> Vec<f64> {
    (0..=20).map(|i| i as f64 / 100.0).collect()
}

fn make_record(
    msg: &LabeledMessage,
    ber: f64,
    protect: bool,
    record_seed: u64,
    alphabet: &SymbolAlphabet,
) -> Result<CorpusRecord, CorruptionError> {
    let spec = CorruptionSpec::new(ber, protect, record_seed)?;
    Ok(CorpusRecord {
        original: msg.text.clone(),
        corrupted: corrupt_message(&msg.text, &spec, alphabet)?,
        ber,
        purpose: msg.purpose,
        task: Task::MessageRecovery,
    })
}

fn check_inputs(messages: &[LabeledMessage], grid: &[f64]) -> Result<(), CorruptionError> {
    if messages.is_empty() || grid.is_empty() {
        return Err(CorruptionError::EmptyInput);
    }
    if let Some(b) = grid.iter().find(|b| !(0.0..=1.0).contains(*b)) {
        return Err(CorruptionError::InvalidBer(*b));
    }
    Ok(())
}

/// Every message at every grid BER, `per_message` times each. Records are
/// ordered message-major, then BER, then repetition.
pub fn generate_corpus(
    messages: &[LabeledMessage],
    grid: &[f64],
    per_message: usize,
    protect_separators: bool,
    seed: u64,
    exec: Execution,
) -> Result<Vec<CorpusRecord>, CorruptionError> {
    check_inputs(messages, grid)?;
    let per_msg = grid.len() * per_message;
    par::map_range(messages.len() * per_msg, exec, |i| {
        let msg = &messages[i / per_msg];
        let ber = grid[(i % per_msg) / per_message];
        make_record(msg, ber, protect_separators, seed::derive(seed, seed::stream::CORRUPTION, i as u64), alphabet())
    })
    .into_iter()
    .collect()
}

/// Exactly `count` records. Record `i` uses BER `grid[i % grid.len()]` and a
/// message drawn from the seed.
pub fn generate_corpus_sized(
    messages: &[LabeledMessage],
    grid: &[f64],
    count: usize,
    protect_separators: bool,
    seed: u64,
    exec: Execution,
) -> Result<Vec<CorpusRecord>, CorruptionError> {
    check_inputs(messages, grid)?;
    par::map_range(count, exec, |i| {
        let mut pick = seed::derived_rng(seed, seed::stream::MESSAGE_PICK, i as u64);
        let msg = &messages[pick.random_range(0..messages.len())];
        let ber = grid[i % grid.len()];
        make_record(msg, ber, protect_separators, seed::derive(seed, seed::stream::CORRUPTION, i as u64), alphabet())
    })
    .into_iter()
    .collect()
}

fn alphabet() -> &'static SymbolAlphabet {
    SymbolAlphabet::default_ref()
}

pub fn write_jsonl<W: Write>(mut w: W, records: &[CorpusRecord]) -> crate::Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_jsonl<R: BufRead>(r: R) -> crate::Result<Vec<CorpusRecord>> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

/// Realized bit-flip rate for one BER bucket of a corpus.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlipAudit {
    pub ber: f64,
    pub records: usize,
    pub bits: usize,
    pub flips: usize,
    pub rate: f64,
}

/// Compares the encodings of `original` and `corrupted` per record and groups
/// the flip counts by BER. Separator repair changes bits, so audit corpora
/// generated without it.
pub fn audit_flip_rates(records: &[CorpusRecord], alphabet: &SymbolAlphabet) -> Result<Vec<FlipAudit>, CorruptionError> {
    let mut buckets: Vec<FlipAudit> = Vec::new();
    for r in records {
        let a = textcodec::encode_text(&r.original, alphabet)?;
        let b = textcodec::encode_text(&r.corrupted, alphabet)?;
        let flips = a.hamming_distance(&b);
        let slot = match buckets.iter_mut().find(|x| x.ber == r.ber) {
            Some(s) => s,
            None => {
                buckets.push(FlipAudit { ber: r.ber, records: 0, bits: 0, flips: 0, rate: 0.0 });
                buckets.last_mut().expect("just pushed")
            }
        };
        slot.records += 1;
        slot.bits += a.len();
        slot.flips += flips;
    }
    for b in &mut buckets {
        b.rate = if b.bits == 0 { 0.0 } else { b.flips as f64 / b.bits as f64 };
    }
    buckets.sort_by(|x, y| x.ber.total_cmp(&y.ber));
    Ok(buckets)
}

/// Character count of a normalized message in bits.
pub fn bit_length(msg: &str) -> usize {
    msg.chars().count() * BITS_PER_CHAR
}
