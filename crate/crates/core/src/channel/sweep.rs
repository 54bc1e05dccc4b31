use rand::RngExt;
use serde::Serialize;

use crate::{
    modem::{Modem, Transmission},
    par::{self, Execution},
    phy::Waveform,
    seed,
};

use super::{apply_channel, noise_for_snr, ChannelParams, Tap};

/// One row of an SNR sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub snr_db: f64,
    pub trials: usize,
    pub bits: usize,
    pub bit_errors: usize,
    pub ber: f64,
    /// Frames whose preamble or header was lost; their bits count as half wrong.
    pub frames_lost: usize,
}

/// Places `tx` at a random offset in silence and runs it through an AWGN
/// channel at in-band SNR `snr_db`. Returns (bit errors, frame lost).
pub(crate) fn awgn_trial(modem: &Modem, tx: &Transmission, snr_db: f64, trial_seed: u64) -> (usize, bool) {
    let mut rng = seed::derived_rng(trial_seed, seed::stream::PADDING, 0);
    let lead = rng.random_range(2_000..6_000usize);
    let padded: Waveform = tx.waveform.padded(lead, 3_000);
    let mut params = ChannelParams::clean(1.0);
    params.carrier_hz = 0.0;
    params.spreading_exponent = 0.0;
    let power = tx.waveform.mean_power() * params.path_gain().powi(2);
    params.noise_level = noise_for_snr(power, snr_db, modem.params().fs, modem.params().bw);
    params.multipath_taps = vec![Tap { delay: 0.0, gain: 1.0 }];
    params.seed = trial_seed;
    let (rx, _) = apply_channel(&padded, &params).expect("valid awgn channel");
    score_reception(modem, tx, &rx.samples)
}

pub(crate) fn score_reception(modem: &Modem, tx: &Transmission, stream: &[f64]) -> (usize, bool) {
    match modem.receive_bits(stream) {
        Ok(r) if r.payload_bits.len() == tx.payload_bits.len() => {
            (r.payload_bits.hamming_distance(&tx.payload_bits), false)
        }
        _ => (tx.payload_bits.len().div_ceil(2), true),
    }
}

/// Monte-Carlo BER of a rendered packet against in-band SNR. Trial seeds are
/// derived from `(seed, point, trial)`, so the output does not depend on
/// `exec`.
pub fn snr_sweep(
    modem: &Modem,
    tx: &Transmission,
    snr_grid: &[f64],
    trials: usize,
    seed: u64,
    exec: Execution,
) -> Vec<SweepPoint> {
    let trials = trials.max(1);
    snr_grid
        .iter()
        .enumerate()
        .map(|(pi, &snr_db)| {
            let results = par::map_range(trials, exec, |t| {
                let s = seed::derive(seed, seed::stream::SWEEP, ((pi as u64) << 32) | t as u64);
                awgn_trial(modem, tx, snr_db, s)
            });
            let bit_errors: usize = results.iter().map(|r| r.0).sum();
            let frames_lost = results.iter().filter(|r| r.1).count();
            let bits = trials * tx.payload_bits.len();
            SweepPoint {
                snr_db,
                trials,
                bits,
                bit_errors,
                ber: if bits == 0 { 0.0 } else { bit_errors as f64 / bits as f64 },
                frames_lost,
            }
        })
        .collect()
}
