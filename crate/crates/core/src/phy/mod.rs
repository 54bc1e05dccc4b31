//! Chirp spread spectrum physical layer.

mod chirp;
mod detect;
mod frame;
mod params;
mod receiver;
mod sync;
pub mod wav;

pub use chirp::{demodulate_symbol, modulate_symbol, ChirpKind, Chirps, DemodResult, FineBin};
pub use detect::{detect_packet, Candidate, PacketDetector, DEFAULT_DETECTION_THRESHOLD};
pub use frame::{
    bits_to_symbols, frame, frame_slots, header_symbol_indices, header_symbols, FrameHeader,
    FramePlan, Slot, HEADER_BITS, PREAMBLE_DOWN, PREAMBLE_UP, TRAINING_CADENCE, TRAINING_SYMBOL,
};
pub use params::ModulationParams;
pub use receiver::{equalize_and_demodulate, Demodulated, Receiver, ReceiverConfig, Reception};
pub use sync::{synchronize, SyncResult, DEFAULT_SYNC_THRESHOLD};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PhyError {
    #[error("invalid modulation parameters: {0}")]
    InvalidParams(String),
    #[error("symbol index {index} out of range for {count} symbols")]
    IndexOutOfRange { index: u32, count: usize },
    #[error("segment has {actual} samples, expected {expected}")]
    SegmentLengthMismatch { expected: usize, actual: usize },
    #[error("synchronization failed: {0}")]
    SyncFailed(&'static str),
    #[error("header decode failed: {0}")]
    HeaderDecodeFailed(String),
    #[error("no packet found")]
    NoPacketFound,
    #[error("payload of {0} bits does not fit the 16-bit length field")]
    PayloadTooLong(usize),
}

/// Real-valued audio at a fixed sample rate.
#[derive(Clone, Debug, PartialEq)]
pub struct Waveform {
    pub samples: Vec<f64>,
    pub fs: f64,
}

impl Waveform {
    pub fn new(samples: Vec<f64>, fs: f64) -> Self {
        Self { samples, fs }
    }

    pub fn silence(len: usize, fs: f64) -> Self {
        Self::new(vec![0.0; len], fs)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.fs
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|x| x * x).sum()
    }

    pub fn mean_power(&self) -> f64 {
        if self.samples.is_empty() {
            0.0
        } else {
            self.energy() / self.samples.len() as f64
        }
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Pads with `before` and `after` samples of silence.
    pub fn padded(&self, before: usize, after: usize) -> Self {
        let mut samples = Vec::with_capacity(before + self.samples.len() + after);
        samples.resize(before, 0.0);
        samples.extend_from_slice(&self.samples);
        samples.resize(samples.len() + after, 0.0);
        Self::new(samples, self.fs)
    }
}
