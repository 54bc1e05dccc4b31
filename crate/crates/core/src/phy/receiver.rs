//! Packet reception: detection, synchronization, header decode and
//! training-symbol timing equalization.

use crate::{
    bits::BitString,
    fec::{self, gray_unmap, CodingMode},
};

use super::{
    chirp::ChirpKind,
    detect::{PacketDetector, DEFAULT_DETECTION_THRESHOLD},
    frame::{header_symbols, FrameHeader, FramePlan, HEADER_BITS},
    sync::{synchronize, SyncResult, DEFAULT_SYNC_THRESHOLD},
    Chirps, DemodResult, PhyError,
};

/// Largest deviation from the predicted timing accepted from one training
/// symbol, in chips.
const MAX_TRAINING_STEP_CHIPS: f64 = 0.5;

/// Training measurements further than this from the fitted line are dropped
/// before the final fit, in chips.
const TRAINING_OUTLIER_CHIPS: f64 = 0.25;

/// Minimum peak-to-mean ratio for a training symbol to be used. Noise alone
/// stays below this about 99% of the time.
const TRAINING_MIN_CONFIDENCE: f64 = 3.0;

/// Least-squares line through (symbol position, timing offset) points.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
struct TimingLine {
    intercept: f64,
    slope: f64,
}

impl TimingLine {
    fn fit(points: &[(f64, f64)]) -> Self {
        let n = points.len() as f64;
        if points.len() < 2 {
            return Self { intercept: points.first().map_or(0.0, |p| p.1), slope: 0.0 };
        }
        let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
        let my = points.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
        Self { intercept: my - slope * mx, slope }
    }

    fn at(&self, pos: f64) -> f64 {
        self.intercept + self.slope * pos
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReceiverConfig {
    pub detection_threshold: f64,
    pub sync_threshold: f64,
    /// Track timing drift with training symbols.
    pub equalize: bool,
}

impl Default for ReceiverConfig {
    fn default() -> Self {
        Self {
            detection_threshold: DEFAULT_DETECTION_THRESHOLD,
            sync_threshold: DEFAULT_SYNC_THRESHOLD,
            equalize: true,
        }
    }
}

/// Demodulated packet before channel decoding.
#[derive(Clone, Debug, PartialEq)]
pub struct Demodulated {
    pub header: FrameHeader,
    /// Coded bits, truncated to the coded length implied by the header.
    pub coded_bits: BitString,
    pub data_symbols: Vec<DemodResult>,
    /// Timing correction applied to each data symbol, in samples.
    pub timing_offsets: Vec<f64>,
}

/// Fully decoded packet.
#[derive(Clone, Debug, PartialEq)]
pub struct Reception {
    pub offset: usize,
    pub sync: SyncResult,
    pub header: FrameHeader,
    pub payload_bits: BitString,
    pub corrected_codewords: usize,
    pub data_symbols: Vec<DemodResult>,
}

/// Copies one symbol window, zero-filling anything outside the stream.
fn window(stream: &[f64], start: f64, len: usize, out: &mut [f64]) -> i64 {
    let s = start.round() as i64;
    for (i, o) in out.iter_mut().enumerate().take(len) {
        let idx = s + i as i64;
        *o = if idx >= 0 { stream.get(idx as usize).copied().unwrap_or(0.0) } else { 0.0 };
    }
    s
}

fn symbols_to_bits(symbols: &[u32], sf: u32, gray: bool) -> BitString {
    let mut bits = BitString::with_capacity(symbols.len() * sf as usize);
    for &k in symbols {
        let v = if gray { gray_unmap(k, sf).expect("demodulated index fits") } else { k };
        bits.push_uint(v as u64, sf as usize);
    }
    bits
}

/// Decodes the header and payload of a synchronized packet.
pub fn equalize_and_demodulate(
    stream: &[f64],
    sync: &SyncResult,
    chirps: &Chirps,
    cfg: &ReceiverConfig,
) -> Result<Demodulated, PhyError> {
    let params = chirps.params();
    let sf = params.sf;
    let len = chirps.symbol_len();
    let chip = params.samples_per_chip();
    let plan0 = FramePlan::new(0, CodingMode::Cr0, sf);
    let start = sync.fine_offset + (plan0.preamble_symbols() * len) as f64;
    if start + ((header_symbols(sf) * len) as f64) > stream.len() as f64 + 0.5 * len as f64 {
        return Err(PhyError::HeaderDecodeFailed("stream ends inside header".into()));
    }
    let mut seg = vec![0.0; len];
    let nominal = |pos: usize| start + (pos * len) as f64;

    let mut header_syms = Vec::with_capacity(header_symbols(sf));
    for i in 0..header_symbols(sf) {
        window(stream, nominal(i), len, &mut seg);
        header_syms.push(chirps.demodulate_symbol(&seg)?.symbol_index);
    }
    let header_coded = symbols_to_bits(&header_syms, sf, true);
    let (header_bits, _) = fec::hamming_block_decode(&header_coded, HEADER_BITS)
        .map_err(|e| PhyError::HeaderDecodeFailed(e.to_string()))?;
    let header = FrameHeader::from_bits(&header_bits)?;
    let plan = FramePlan::from_header(&header, sf);

    let data_count = plan.payload_symbol_count;
    let cadence = plan.training_cadence;
    let groups = data_count / cadence;
    // Frame position of the k-th data symbol (training symbols follow every
    // full group of `cadence` data symbols).
    let data_pos = |k: usize| plan.header_symbols + k + k / cadence;

    // Timing offsets in samples, modelled as a line over frame position and
    // pinned to zero at the header start, where sync measured it. Each
    // training symbol is looked for where the current line predicts it.
    let line = if cfg.equalize {
        let mut points = vec![(0.0, 0.0)];
        let mut line = TimingLine::default();
        for g in 0..groups {
            let tp = plan.header_symbols + (g + 1) * (cadence + 1) - 1;
            let predicted = line.at(tp as f64);
            let win = window(stream, nominal(tp) + predicted, len, &mut seg);
            let fb = chirps.fine_bin(&seg, ChirpKind::Up)?;
            if fb.bin.abs() <= MAX_TRAINING_STEP_CHIPS && fb.confidence >= TRAINING_MIN_CONFIDENCE {
                points.push((tp as f64, win as f64 - nominal(tp) - fb.bin * chip));
                line = TimingLine::fit(&points);
            }
        }
        let keep: Vec<(f64, f64)> = points
            .iter()
            .enumerate()
            .filter(|(i, p)| *i == 0 || (p.1 - line.at(p.0)).abs() <= TRAINING_OUTLIER_CHIPS * chip)
            .map(|(_, p)| *p)
            .collect();
        TimingLine::fit(&keep)
    } else {
        TimingLine::default()
    };

    let mut data_symbols = Vec::with_capacity(data_count);
    let mut timing_offsets = Vec::with_capacity(data_count);
    for k in 0..data_count {
        let pos = data_pos(k);
        let off = line.at(pos as f64);
        window(stream, nominal(pos) + off, len, &mut seg);
        data_symbols.push(chirps.demodulate_symbol(&seg)?);
        timing_offsets.push(off);
    }

    let indices: Vec<u32> = data_symbols.iter().map(|d| d.symbol_index).collect();
    let mut coded_bits = symbols_to_bits(&indices, sf, header.mode.uses_gray());
    coded_bits.truncate(plan.coded_bit_length());
    Ok(Demodulated { header, coded_bits, data_symbols, timing_offsets })
}

/// Receiver for one parameter set. Holds no per-stream state, so one
/// instance can serve many threads.
#[derive(Debug)]
pub struct Receiver<'a> {
    chirps: &'a Chirps,
    cfg: ReceiverConfig,
}

impl<'a> Receiver<'a> {
    pub fn new(chirps: &'a Chirps, cfg: ReceiverConfig) -> Self {
        Self { chirps, cfg }
    }

    pub fn config(&self) -> &ReceiverConfig {
        &self.cfg
    }

    /// Decodes the packet whose preamble was detected at `offset`.
    pub fn decode_at(&self, stream: &[f64], offset: usize) -> Result<Reception, PhyError> {
        let sync = synchronize(stream, offset, self.chirps, self.cfg.sync_threshold)?;
        let demod = equalize_and_demodulate(stream, &sync, self.chirps, &self.cfg)?;
        let (payload_bits, corrected_codewords) = fec::code_pipeline_decode(
            &demod.coded_bits,
            demod.header.mode,
            demod.header.payload_bit_length,
        )
        .map_err(|e| PhyError::HeaderDecodeFailed(e.to_string()))?;
        Ok(Reception {
            offset,
            sync,
            header: demod.header,
            payload_bits,
            corrected_codewords,
            data_symbols: demod.data_symbols,
        })
    }

    /// Returns the first packet that decodes, scanning the stream
    /// incrementally so the rest of a long recording is not correlated.
    pub fn receive_first(&self, stream: &[f64]) -> Result<Reception, PhyError> {
        let mut det = PacketDetector::new(self.chirps, self.cfg.detection_threshold);
        let mut last_err = None;
        let step = 4 * det.template_len();
        let mut chunks = stream.chunks(step);
        loop {
            let (found, end) = match chunks.next() {
                Some(c) => (det.push(c), false),
                None => (det.finish(), true),
            };
            for cand in found {
                match self.decode_at(stream, cand.offset) {
                    Ok(r) => return Ok(r),
                    Err(e) => last_err = Some(e),
                }
            }
            if end {
                return Err(last_err.unwrap_or(PhyError::NoPacketFound));
            }
        }
    }

    /// Decodes every detected packet, in stream order.
    pub fn receive_all(&self, stream: &[f64]) -> Vec<Result<Reception, PhyError>> {
        let cands = super::detect_packet(stream, self.chirps, self.cfg.detection_threshold);
        let mut out: Vec<Result<Reception, PhyError>> = Vec::with_capacity(cands.len());
        let mut next_free = 0usize;
        for cand in cands {
            if cand.offset < next_free {
                continue;
            }
            let r = self.decode_at(stream, cand.offset);
            if let Ok(rx) = &r {
                let plan = FramePlan::from_header(&rx.header, self.chirps.params().sf);
                next_free = cand.offset + plan.total_symbols() * self.chirps.symbol_len();
            }
            out.push(r);
        }
        out
    }
}
