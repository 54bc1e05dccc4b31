//! Chirp synthesis and non-coherent dechirp demodulation.

use std::{f64::consts::PI, sync::Arc};

use rustfft::{num_complex::Complex64, Fft, FftPlanner};

use super::{ModulationParams, PhyError, Waveform};

/// Zero-padding factor for fractional-bin estimates.
const FINE_PAD: usize = 8;

/// Result of demodulating one symbol window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DemodResult {
    pub symbol_index: u32,
    /// Folded-spectrum peak magnitude over mean magnitude.
    pub confidence: f64,
}

/// Fractional dechirped tone position in chips, wrapped to `[-N/2, N/2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FineBin {
    pub bin: f64,
    pub confidence: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChirpKind {
    Up,
    Down,
}

/// Precomputed chirp tables and FFT plans for one parameter set.
pub struct Chirps {
    params: ModulationParams,
    n: usize,
    len: usize,
    symbols: Vec<Vec<f64>>,
    down: Vec<f64>,
    up_ref: Vec<Complex64>,
    down_ref: Vec<Complex64>,
    fft: Arc<dyn Fft<f64>>,
    fine_fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Chirps {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Chirps").field("params", &self.params).finish_non_exhaustive()
    }
}

/// Baseband phase of the up-chirp cyclically shifted by `shift` chips.
fn chirp_phase(params: &ModulationParams, shift: f64) -> Vec<f64> {
    let n = params.symbol_count() as f64;
    let len = params.samples_per_symbol();
    let chip = params.samples_per_chip();
    let step = params.bw / n;
    let mut phase = Vec::with_capacity(len);
    let mut acc = 0.0;
    for i in 0..len {
        phase.push(acc);
        let pos = (i as f64 / chip + shift).rem_euclid(n);
        let freq = -params.bw / 2.0 + step * pos;
        acc += 2.0 * PI * freq / params.fs;
    }
    phase
}

impl Chirps {
    pub fn new(params: ModulationParams) -> Result<Self, PhyError> {
        params.validate()?;
        let n = params.symbol_count();
        let len = params.samples_per_symbol();
        let carrier: Vec<f64> =
            (0..len).map(|i| 2.0 * PI * params.fc * i as f64 / params.fs).collect();
        let symbols = (0..n)
            .map(|k| {
                chirp_phase(&params, k as f64)
                    .iter()
                    .zip(&carrier)
                    .map(|(p, c)| (c + p).cos())
                    .collect()
            })
            .collect();
        let base = chirp_phase(&params, 0.0);
        let down = base.iter().zip(&carrier).map(|(p, c)| (c - p).cos()).collect();
        let up_ref = base.iter().zip(&carrier).map(|(p, c)| Complex64::from_polar(1.0, -(c + p))).collect();
        let down_ref =
            base.iter().zip(&carrier).map(|(p, c)| Complex64::from_polar(1.0, -(c - p))).collect();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(len);
        let fine_fft = planner.plan_fft_forward(len * FINE_PAD);
        Ok(Self { params, n, len, symbols, down, up_ref, down_ref, fft, fine_fft })
    }

    pub fn params(&self) -> &ModulationParams {
        &self.params
    }

    pub fn symbol_len(&self) -> usize {
        self.len
    }

    pub fn symbol_count(&self) -> usize {
        self.n
    }

    /// Passband samples of data symbol `k`.
    pub fn symbol(&self, k: u32) -> Result<&[f64], PhyError> {
        self.symbols
            .get(k as usize)
            .map(Vec::as_slice)
            .ok_or(PhyError::IndexOutOfRange { index: k, count: self.n })
    }

    /// Base down-chirp used as the sync marker.
    pub fn down_chirp(&self) -> &[f64] {
        &self.down
    }

    /// Complex analytic version of a symbol, used as a correlation template.
    pub(crate) fn analytic(&self, kind: ChirpKind) -> Vec<Complex64> {
        let r = match kind {
            ChirpKind::Up => &self.up_ref,
            ChirpKind::Down => &self.down_ref,
        };
        r.iter().map(|z| z.conj()).collect()
    }

    fn dechirp(&self, segment: &[f64], kind: ChirpKind, pad: usize) -> Vec<Complex64> {
        let r = match kind {
            ChirpKind::Up => &self.up_ref,
            ChirpKind::Down => &self.down_ref,
        };
        let mut buf = vec![Complex64::new(0.0, 0.0); self.len * pad];
        for (i, (&x, z)) in segment.iter().zip(r).enumerate() {
            buf[i] = z * x;
        }
        buf
    }

    /// Folds the wrapped part of a dechirped tone (bin `k - 2^sf`) onto the
    /// unwrapped part (bin `k`). The two halves are phase-continuous, so they
    /// are added as complex values; this is the alias sum a critically
    /// sampled receiver would see, restricted to the two occupied aliases.
    fn fold(&self, spectrum: &[Complex64], pad: usize) -> Vec<f64> {
        let bins = self.n * pad;
        let total = spectrum.len();
        (0..bins).map(|k| (spectrum[k] + spectrum[total - bins + k]).norm()).collect()
    }

    fn check_len(&self, segment: &[f64]) -> Result<(), PhyError> {
        if segment.len() != self.len {
            return Err(PhyError::SegmentLengthMismatch { expected: self.len, actual: segment.len() });
        }
        Ok(())
    }

    /// Folded `2^sf`-bin magnitude spectrum of a dechirped up-chirp window.
    pub fn folded_spectrum(&self, segment: &[f64]) -> Result<Vec<f64>, PhyError> {
        self.check_len(segment)?;
        let mut buf = self.dechirp(segment, ChirpKind::Up, 1);
        self.fft.process(&mut buf);
        Ok(self.fold(&buf, 1))
    }

    pub fn demodulate_symbol(&self, segment: &[f64]) -> Result<DemodResult, PhyError> {
        let folded = self.folded_spectrum(segment)?;
        let (k, peak) = argmax(&folded);
        let mean = folded.iter().sum::<f64>() / folded.len() as f64;
        let confidence = if mean > 0.0 { peak / mean } else { 0.0 };
        Ok(DemodResult { symbol_index: k as u32, confidence })
    }

    /// Zero-padded folded spectrum for fractional-bin estimation.
    pub(crate) fn fine_spectrum(&self, segment: &[f64], kind: ChirpKind) -> Result<Vec<f64>, PhyError> {
        self.check_len(segment)?;
        let mut buf = self.dechirp(segment, kind, FINE_PAD);
        self.fine_fft.process(&mut buf);
        Ok(self.fold(&buf, FINE_PAD))
    }

    /// Locates the dechirped tone of `spectrum` (from [`Self::fine_spectrum`]
    /// or a sum of several) to a fraction of a chip.
    pub(crate) fn fine_peak(&self, spectrum: &[f64]) -> FineBin {
        let m = spectrum.len();
        let (j, peak) = argmax(spectrum);
        let left = spectrum[(j + m - 1) % m];
        let right = spectrum[(j + 1) % m];
        let denom = left - 2.0 * peak + right;
        let delta = if denom.abs() > f64::EPSILON { 0.5 * (left - right) / denom } else { 0.0 };
        let n = self.n as f64;
        let bin = ((j as f64 + delta) / FINE_PAD as f64 + n / 2.0).rem_euclid(n) - n / 2.0;
        let mean = spectrum.iter().sum::<f64>() / m as f64;
        FineBin { bin, confidence: if mean > 0.0 { peak / mean } else { 0.0 } }
    }

    pub fn fine_bin(&self, segment: &[f64], kind: ChirpKind) -> Result<FineBin, PhyError> {
        Ok(self.fine_peak(&self.fine_spectrum(segment, kind)?))
    }

    /// One symbol of passband audio for index `k`.
    pub fn modulate_symbol(&self, k: u32) -> Result<Waveform, PhyError> {
        Ok(Waveform::new(self.symbol(k)?.to_vec(), self.params.fs))
    }
}

fn argmax(v: &[f64]) -> (usize, f64) {
    v.iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, x)| if x > best.1 { (i, x) } else { best })
}

/// Convenience wrapper building the tables for a single call.
pub fn modulate_symbol(k: u32, params: &ModulationParams) -> Result<Waveform, PhyError> {
    Chirps::new(*params)?.modulate_symbol(k)
}

/// Convenience wrapper building the tables for a single call.
pub fn demodulate_symbol(segment: &Waveform, params: &ModulationParams) -> Result<DemodResult, PhyError> {
    Chirps::new(*params)?.demodulate_symbol(&segment.samples)
}
