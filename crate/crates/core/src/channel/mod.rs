//! Parametric underwater acoustic channel.
//!
//! Applied in order: geometric spreading plus Thorp absorption, a tapped
//! delay line, clock-drift resampling, then white Gaussian noise. The result
//! is a pure function of (signal, params); the noise draw comes from
//! `params.seed`.

mod resample;
mod sweep;

pub use resample::resample;
pub use sweep::{snr_sweep, SweepPoint};

use std::path::Path;

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{phy::Waveform, seed};

/// Noise level giving about 2% payload BER at 20 m with the default stack.
/// Produced by `aquamodem calibrate` (see `experiment::calibrate_noise_level`).
pub const CALIBRATED_NOISE_LEVEL: f64 = 0.298;

/// Reported SNR when no noise is added.
pub const NOISELESS_SNR_DB: f64 = 300.0;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("invalid channel parameters: {0}")]
    InvalidParams(String),
    #[error("input signal is empty")]
    EmptySignal,
}

/// One multipath arrival.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tap {
    /// Delay in seconds relative to the direct path.
    pub delay: f64,
    pub gain: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelParams {
    /// Range in metres.
    pub distance: f64,
    /// Spreading exponent `k`: received power falls as `distance^-k`.
    pub spreading_exponent: f64,
    /// Standard deviation of the additive noise per sample.
    pub noise_level: f64,
    pub multipath_taps: Vec<Tap>,
    /// Receiver clock offset in parts per million.
    pub drift_ppm: f64,
    pub seed: u64,
    /// Frequency used for the absorption term, in Hz.
    pub carrier_hz: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            distance: 20.0,
            spreading_exponent: 1.5,
            noise_level: CALIBRATED_NOISE_LEVEL,
            // Surface/bottom bounce at ~3 m depth; illustrative.
            multipath_taps: vec![Tap { delay: 0.0, gain: 1.0 }, Tap { delay: 0.002, gain: 0.3 }],
            drift_ppm: 20.0,
            seed: 0,
            carrier_hz: 11_000.0,
        }
    }
}

impl ChannelParams {
    /// Distance-only channel: no noise, no multipath, no drift.
    pub fn clean(distance: f64) -> Self {
        Self {
            distance,
            noise_level: 0.0,
            multipath_taps: vec![Tap { delay: 0.0, gain: 1.0 }],
            drift_ppm: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        let bad = |s: &str| Err(ChannelError::InvalidParams(s.to_string()));
        if !(self.distance > 0.0 && self.distance.is_finite()) {
            return bad("distance must be positive");
        }
        if !self.spreading_exponent.is_finite() {
            return bad("spreading exponent must be finite");
        }
        if !(self.noise_level >= 0.0 && self.noise_level.is_finite()) {
            return bad("noise level must be non-negative");
        }
        if self.multipath_taps.iter().any(|t| !(t.delay >= 0.0 && t.delay.is_finite())) {
            return bad("tap delays must be non-negative");
        }
        if self.multipath_taps.iter().any(|t| !t.gain.is_finite()) {
            return bad("tap gains must be finite");
        }
        if !(self.drift_ppm.is_finite() && self.drift_ppm > -1e5 && self.drift_ppm < 1e5) {
            return bad("drift out of range");
        }
        if !(self.carrier_hz >= 0.0 && self.carrier_hz.is_finite()) {
            return bad("carrier must be non-negative");
        }
        Ok(())
    }

    /// Amplitude gain from spreading and absorption, referenced to 1 m.
    pub fn path_gain(&self) -> f64 {
        let spreading = self.distance.powf(-self.spreading_exponent / 2.0);
        let absorption_db = thorp_db_per_km(self.carrier_hz) * self.distance / 1000.0;
        spreading * 10f64.powf(-absorption_db / 20.0)
    }

    pub fn from_toml(s: &str) -> crate::Result<Self> {
        let p: Self = toml::from_str(s).map_err(|e| crate::Error::Config(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("channel params serialize")
    }

    pub fn load(path: &Path) -> crate::Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }
}

/// Thorp's absorption coefficient in dB/km for frequency `f_hz`.
pub fn thorp_db_per_km(f_hz: f64) -> f64 {
    let f2 = (f_hz / 1000.0).powi(2);
    0.11 * f2 / (1.0 + f2) + 44.0 * f2 / (4100.0 + f2) + 2.75e-4 * f2 + 0.003
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChannelReport {
    /// Signal-to-noise ratio within the chirp band, in dB. Signal power is
    /// measured over the active (non-silent) span of the noiseless output.
    pub effective_snr_db: f64,
    pub path_gain: f64,
    /// Taps as (delay in samples, gain).
    pub applied_taps: Vec<(usize, f64)>,
    pub drift_applied_ppm: f64,
}

/// In-band SNR for a signal of mean power `signal_power` in white noise of
/// per-sample variance `noise_var` at `fs`, over bandwidth `bw`.
pub fn in_band_snr_db(signal_power: f64, noise_var: f64, fs: f64, bw: f64) -> f64 {
    if noise_var <= 0.0 {
        return NOISELESS_SNR_DB;
    }
    if signal_power <= 0.0 {
        return -NOISELESS_SNR_DB;
    }
    10.0 * (signal_power / (noise_var * 2.0 * bw / fs)).log10()
}

/// Per-sample noise deviation giving in-band SNR `snr_db`.
pub fn noise_for_snr(signal_power: f64, snr_db: f64, fs: f64, bw: f64) -> f64 {
    (signal_power * fs / (2.0 * bw * 10f64.powf(snr_db / 10.0))).sqrt()
}

fn active_power(samples: &[f64]) -> f64 {
    let first = samples.iter().position(|x| *x != 0.0);
    let last = samples.iter().rposition(|x| *x != 0.0);
    match (first, last) {
        (Some(a), Some(b)) => samples[a..=b].iter().map(|x| x * x).sum::<f64>() / (b - a + 1) as f64,
        _ => 0.0,
    }
}

/// Bandwidth used when reporting in-band SNR.
pub const REPORT_BANDWIDTH_HZ: f64 = 2000.0;

pub fn apply_channel(
    signal: &Waveform,
    params: &ChannelParams,
) -> Result<(Waveform, ChannelReport), ChannelError> {
    params.validate()?;
    if signal.is_empty() {
        return Err(ChannelError::EmptySignal);
    }
    let fs = signal.fs;
    let gain = params.path_gain();

    let taps: Vec<(usize, f64)> = params
        .multipath_taps
        .iter()
        .map(|t| ((t.delay * fs).round() as usize, t.gain))
        .collect();
    let max_delay = taps.iter().map(|t| t.0).max().unwrap_or(0);
    let mut out = vec![0.0; signal.len() + max_delay];
    for &(d, g) in &taps {
        let g = g * gain;
        for (o, x) in out[d..].iter_mut().zip(&signal.samples) {
            *o += g * x;
        }
    }

    if params.drift_ppm != 0.0 {
        out = resample(&out, 1.0 + params.drift_ppm * 1e-6);
    }

    let power = active_power(&out);
    if params.noise_level > 0.0 {
        let normal = Normal::new(0.0, params.noise_level).expect("validated noise level");
        let mut rng = seed::derived_rng(params.seed, seed::stream::CHANNEL, 0);
        for o in out.iter_mut() {
            *o += normal.sample(&mut rng);
        }
    }
    let report = ChannelReport {
        effective_snr_db: in_band_snr_db(power, params.noise_level.powi(2), fs, REPORT_BANDWIDTH_HZ),
        path_gain: gain,
        applied_taps: taps,
        drift_applied_ppm: params.drift_ppm,
    };
    Ok((Waveform::new(out, fs), report))
}
