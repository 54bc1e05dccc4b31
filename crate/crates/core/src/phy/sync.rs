//! Fine timing from the preamble's up/down chirp pair.
//!
//! A window that starts `d` chips late moves the dechirped up-chirp tone to
//! `+d` and the down-chirp tone to `-d`, while a carrier offset moves both
//! the same way. Half the difference is the timing error.

use super::{
    chirp::ChirpKind,
    frame::{PREAMBLE_DOWN, PREAMBLE_UP},
    Chirps, PhyError,
};

/// Minimum peak-to-mean ratio of the combined down-chirp spectrum.
pub const DEFAULT_SYNC_THRESHOLD: f64 = 2.5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyncResult {
    /// Refined preamble start, in fractional samples.
    pub fine_offset: f64,
    /// Correction applied to the coarse offset, in chips.
    pub timing_chips: f64,
    /// Frequency offset estimate, in FFT bins.
    pub cfo_bins: f64,
    pub confidence: f64,
}

fn summed_spectrum(
    stream: &[f64],
    chirps: &Chirps,
    starts: impl Iterator<Item = usize>,
    kind: ChirpKind,
) -> Result<Vec<f64>, PhyError> {
    let len = chirps.symbol_len();
    let mut acc: Option<Vec<f64>> = None;
    for s in starts {
        let seg = stream.get(s..s + len).ok_or(PhyError::SyncFailed("preamble runs past end of stream"))?;
        let spec = chirps.fine_spectrum(seg, kind)?;
        match acc.as_mut() {
            Some(a) => a.iter_mut().zip(&spec).for_each(|(a, b)| *a += b),
            None => acc = Some(spec),
        }
    }
    acc.ok_or(PhyError::SyncFailed("empty preamble"))
}

/// Refines a detector candidate at `offset`.
pub fn synchronize(
    stream: &[f64],
    offset: usize,
    chirps: &Chirps,
    threshold: f64,
) -> Result<SyncResult, PhyError> {
    let len = chirps.symbol_len();
    // Skip the first up-chirp: an early candidate may put it before the stream.
    let ups = summed_spectrum(stream, chirps, (1..PREAMBLE_UP).map(|i| offset + i * len), ChirpKind::Up)?;
    let downs = summed_spectrum(
        stream,
        chirps,
        (PREAMBLE_UP..PREAMBLE_UP + PREAMBLE_DOWN).map(|i| offset + i * len),
        ChirpKind::Down,
    )?;
    let up = chirps.fine_peak(&ups);
    let down = chirps.fine_peak(&downs);
    if down.confidence < threshold || up.confidence < threshold {
        return Err(PhyError::SyncFailed("sync marker below threshold"));
    }
    let n = chirps.symbol_count() as f64;
    let mut diff = up.bin - down.bin;
    // Both bins live on a circle of N chips; take the short way round.
    diff = (diff + n / 2.0).rem_euclid(n) - n / 2.0;
    let timing_chips = diff / 2.0;
    let cfo_bins = up.bin - timing_chips;
    let fine_offset = offset as f64 - timing_chips * chirps.params().samples_per_chip();
    Ok(SyncResult {
        fine_offset,
        timing_chips,
        cfo_bins: (cfo_bins + n / 2.0).rem_euclid(n) - n / 2.0,
        confidence: down.confidence.min(up.confidence),
    })
}
