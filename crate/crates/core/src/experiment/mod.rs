//! Monte-Carlo experiments over the full stack: distance sweeps, noise
//! calibration, coding and separator ablations, and drift equalization.

mod ablation;
mod report;

pub use ablation::{ablation, AblationConfig, AblationRow};
pub use report::{ExperimentReport, ReportMeta};

use rand::RngExt;
use serde::{Deserialize, Serialize};

use crate::{
    bits::BitString,
    channel::{apply_channel, noise_for_snr, ChannelParams, Tap},
    corpus::LabeledMessage,
    fec::CodingMode,
    modem::{Modem, Transmission},
    par::{self, Execution},
    phy::ReceiverConfig,
    recovery::{Recoverer, SimilarityMetric},
    seed,
    textcodec::decode_bits,
};

/// What came out of one packet sent over the simulated channel.
#[derive(Clone, Debug, PartialEq)]
pub struct LinkOutcome {
    pub bits: usize,
    pub bit_errors: usize,
    /// Packet not detected or header not decoded.
    pub lost: bool,
    pub received: Option<BitString>,
}

/// Pads `tx` with a random lead-in, passes it through `channel` and decodes
/// the first packet found.
pub fn run_link(
    modem: &Modem,
    tx: &Transmission,
    channel: &ChannelParams,
    rx: ReceiverConfig,
    trial_seed: u64,
) -> crate::Result<LinkOutcome> {
    let mut rng = seed::derived_rng(trial_seed, seed::stream::PADDING, 0);
    let lead = rng.random_range(2_000..6_000usize);
    let stream = tx.waveform.padded(lead, 3_000);
    let (received, _) = apply_channel(&stream, channel)?;
    let bits = tx.payload_bits.len();
    Ok(match modem.receiver_with(rx).receive_first(&received.samples) {
        Ok(r) if r.payload_bits.len() == bits => LinkOutcome {
            bits,
            bit_errors: r.payload_bits.hamming_distance(&tx.payload_bits),
            lost: false,
            received: Some(r.payload_bits),
        },
        _ => LinkOutcome { bits, bit_errors: bits.div_ceil(2), lost: true, received: None },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceSweepConfig {
    pub distances: Vec<f64>,
    pub trials: usize,
    pub mode: CodingMode,
    /// Template; `distance` and `seed` are set per trial.
    pub channel: ChannelParams,
    pub threshold: f64,
    pub seed: u64,
}

impl Default for DistanceSweepConfig {
    fn default() -> Self {
        Self {
            distances: vec![5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
            trials: 100,
            mode: CodingMode::Cr3,
            channel: ChannelParams::default(),
            threshold: crate::recovery::DEFAULT_SUCCESS_THRESHOLD,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceRow {
    pub distance_m: f64,
    pub trials: usize,
    pub bits: usize,
    pub bit_errors: usize,
    pub ber_measured: f64,
    pub frames_lost: usize,
    pub mean_similarity: f64,
    pub success_rate: f64,
}

struct TrialResult {
    bits: usize,
    bit_errors: usize,
    lost: bool,
    similarity: f64,
}

/// Sends `trials` messages at each distance and scores bit errors and
/// recovered-text similarity. Trial `t` uses the same message, lead-in and
/// noise draw at every distance.
pub fn distance_sweep(
    modem: &Modem,
    messages: &[LabeledMessage],
    cfg: &DistanceSweepConfig,
    recoverer: &dyn Recoverer,
    metric: &dyn SimilarityMetric,
    exec: Execution,
) -> crate::Result<Vec<DistanceRow>> {
    if messages.is_empty() {
        return Err(crate::corruption::CorruptionError::EmptyInput.into());
    }
    let trials = cfg.trials.max(1);
    let exec = if recoverer.concurrent() && metric.concurrent() { exec } else { Execution::Sequential };
    let mut rows = Vec::with_capacity(cfg.distances.len());
    for &distance in &cfg.distances {
        let results = par::map_range(trials, exec, |t| -> crate::Result<TrialResult> {
            let mut pick = seed::derived_rng(cfg.seed, seed::stream::MESSAGE_PICK, t as u64);
            let msg = &messages[pick.random_range(0..messages.len())];
            let tx = modem.transmit_text(&msg.text, cfg.mode)?;
            let trial_seed = seed::derive(cfg.seed, seed::stream::SWEEP, t as u64);
            let channel = ChannelParams { distance, seed: trial_seed, ..cfg.channel.clone() };
            let out = run_link(modem, &tx, &channel, ReceiverConfig::default(), trial_seed)?;
            let text = out.received.as_ref().map(|b| decode_bits(b, modem.alphabet())).unwrap_or_default();
            let recovered = recoverer.recover(&text, msg.purpose)?;
            Ok(TrialResult {
                bits: out.bits,
                bit_errors: out.bit_errors,
                lost: out.lost,
                similarity: metric.similarity(&recovered, &msg.text)?,
            })
        })
        .into_iter()
        .collect::<crate::Result<Vec<_>>>()?;
        let bits: usize = results.iter().map(|r| r.bits).sum();
        let bit_errors: usize = results.iter().map(|r| r.bit_errors).sum();
        rows.push(DistanceRow {
            distance_m: distance,
            trials,
            bits,
            bit_errors,
            ber_measured: bit_errors as f64 / bits.max(1) as f64,
            frames_lost: results.iter().filter(|r| r.lost).count(),
            mean_similarity: results.iter().map(|r| r.similarity).sum::<f64>() / trials as f64,
            success_rate: results.iter().filter(|r| r.similarity >= cfg.threshold).count() as f64 / trials as f64,
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConfig {
    pub distance: f64,
    pub target_ber: f64,
    pub frames: usize,
    pub mode: CodingMode,
    pub channel: ChannelParams,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            distance: 20.0,
            target_ber: 0.02,
            frames: 100,
            mode: CodingMode::Cr3,
            channel: ChannelParams::default(),
            iterations: 16,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationResult {
    pub noise_level: f64,
    pub ber: f64,
}

/// Finds the noise level at which the payload BER at `cfg.distance` is
/// closest to `cfg.target_ber`, by bisection in log-noise. Every evaluation
/// reuses the same messages and noise draws.
pub fn calibrate_noise_level(
    modem: &Modem,
    messages: &[LabeledMessage],
    cfg: &CalibrationConfig,
    exec: Execution,
) -> crate::Result<CalibrationResult> {
    let sweep = DistanceSweepConfig {
        distances: vec![cfg.distance],
        trials: cfg.frames,
        mode: cfg.mode,
        channel: cfg.channel.clone(),
        threshold: crate::recovery::DEFAULT_SUCCESS_THRESHOLD,
        seed: cfg.seed,
    };
    let ber_at = |noise: f64| -> crate::Result<f64> {
        let mut s = sweep.clone();
        s.channel.noise_level = noise;
        let rows =
            distance_sweep(modem, messages, &s, &crate::recovery::IdentityRecoverer, &crate::recovery::HybridSimilarity, exec)?;
        Ok(rows[0].ber_measured)
    };
    let (mut lo, mut hi) = (-4.0f64, 1.0f64);
    let mut best = CalibrationResult { noise_level: 10f64.powf(lo), ber: ber_at(10f64.powf(lo))? };
    for _ in 0..cfg.iterations.max(1) {
        let mid = 0.5 * (lo + hi);
        let noise = 10f64.powf(mid);
        let ber = ber_at(noise)?;
        if (ber - cfg.target_ber).abs() < (best.ber - cfg.target_ber).abs() {
            best = CalibrationResult { noise_level: noise, ber };
        }
        if ber < cfg.target_ber {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftConfig {
    pub drift_ppm: f64,
    /// Payload symbols per frame, excluding preamble, header and training.
    pub data_symbols: usize,
    /// In-band SNR.
    pub snr_db: f64,
    pub trials: usize,
    pub seed: u64,
}

impl Default for DriftConfig {
    fn default() -> Self {
        Self { drift_ppm: 50.0, data_symbols: 100, snr_db: 2.0, trials: 100, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DriftResult {
    pub bits: usize,
    pub equalized_errors: usize,
    pub unequalized_errors: usize,
    pub equalized_ber: f64,
    pub unequalized_ber: f64,
    pub frames_lost: usize,
}

/// Uncoded frames of `data_symbols` random symbols sent through a drifting
/// AWGN channel and decoded with and without training-symbol tracking. Both
/// receivers see the same received samples.
pub fn drift_experiment(modem: &Modem, cfg: &DriftConfig, exec: Execution) -> crate::Result<DriftResult> {
    let sf = modem.params().sf as usize;
    let trials = cfg.trials.max(1);
    let outcomes = par::map_range(trials, exec, |t| -> crate::Result<(usize, usize, usize, bool)> {
        let mut rng = seed::derived_rng(cfg.seed, seed::stream::MESSAGE_PICK, t as u64);
        let payload: BitString = (0..cfg.data_symbols * sf).map(|_| rng.random_bool(0.5)).collect();
        let tx = modem.transmit_bits(&payload, CodingMode::Cr0)?;
        let trial_seed = seed::derive(cfg.seed, seed::stream::SWEEP, t as u64);
        let mut channel = ChannelParams::clean(1.0);
        channel.spreading_exponent = 0.0;
        channel.carrier_hz = 0.0;
        channel.multipath_taps = vec![Tap { delay: 0.0, gain: 1.0 }];
        channel.drift_ppm = cfg.drift_ppm;
        channel.noise_level = noise_for_snr(tx.waveform.mean_power(), cfg.snr_db, modem.params().fs, modem.params().bw);
        channel.seed = trial_seed;
        let eq = run_link(modem, &tx, &channel, ReceiverConfig { equalize: true, ..Default::default() }, trial_seed)?;
        let raw = run_link(modem, &tx, &channel, ReceiverConfig { equalize: false, ..Default::default() }, trial_seed)?;
        Ok((payload.len(), eq.bit_errors, raw.bit_errors, eq.lost || raw.lost))
    })
    .into_iter()
    .collect::<crate::Result<Vec<_>>>()?;
    let bits: usize = outcomes.iter().map(|o| o.0).sum();
    let equalized_errors: usize = outcomes.iter().map(|o| o.1).sum();
    let unequalized_errors: usize = outcomes.iter().map(|o| o.2).sum();
    Ok(DriftResult {
        bits,
        equalized_errors,
        unequalized_errors,
        equalized_ber: equalized_errors as f64 / bits as f64,
        unequalized_ber: unequalized_errors as f64 / bits as f64,
        frames_lost: outcomes.iter().filter(|o| o.3).count(),
    })
}
