//! Command-line surface.

use std::{path::PathBuf, str::FromStr};

use aquamodem::{context::PurposeTag, fec::CodingMode};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "aquamodem", version, about = "Acoustic text modem, channel simulator and recovery experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every command. Values given here override `--config`.
#[derive(Clone, Debug, Default, Args)]
pub struct Common {
    /// TOML settings file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Spreading factor.
    #[arg(long)]
    pub sf: Option<u32>,
    /// Chirp bandwidth, Hz.
    #[arg(long)]
    pub bw: Option<f64>,
    /// Carrier frequency, Hz.
    #[arg(long)]
    pub fc: Option<f64>,
    /// Sample rate, Hz.
    #[arg(long)]
    pub fs: Option<f64>,
    /// Channel coding: cr0 (none) or cr3 (Hamming + interleave + Gray).
    #[arg(long)]
    pub mode: Option<CodingMode>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Similarity threshold for counting a recovery as a success.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Channel range, metres.
    #[arg(long)]
    pub distance: Option<f64>,
    /// Channel noise standard deviation.
    #[arg(long)]
    pub noise: Option<f64>,
    /// Receiver clock drift, ppm.
    #[arg(long)]
    pub drift_ppm: Option<f64>,
    /// Run Monte-Carlo trials on one thread.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RecovererKind {
    Identity,
    Dictionary,
    External,
}

#[derive(Clone, Debug, Args)]
pub struct RecovererArgs {
    #[arg(long, value_enum, default_value = "dictionary")]
    pub recoverer: RecovererKind,
    /// Vocabulary file, one word per line. Defaults to the built-in message pool's words.
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    /// Program serving the external recoverer over JSON lines.
    #[arg(long)]
    pub recoverer_cmd: Option<String>,
    #[arg(long = "recoverer-arg", allow_hyphen_values = true)]
    pub recoverer_args: Vec<String>,
    /// Program serving an external similarity metric over JSON lines.
    #[arg(long)]
    pub similarity_cmd: Option<String>,
    #[arg(long = "similarity-arg", allow_hyphen_values = true)]
    pub similarity_args: Vec<String>,
}

/// Parses `a,b,c` or `start:stop:step` (inclusive).
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("not a number: {t:?}"));
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, step] = parts[..] else {
            return Err(format!("range must be start:stop:step, got {s:?}"));
        };
        let (a, b, step) = (num(a)?, num(b)?, num(step)?);
        if !(step > 0.0) || b < a {
            return Err(format!("empty range {s:?}"));
        }
        let n = ((b - a) / step + 1e-9).floor() as usize;
        // Round to suppress accumulated float noise in the printed values.
        Ok((0..=n).map(|i| ((a + i as f64 * step) * 1e9).round() / 1e9).collect())
    } else {
        let v = s.split(',').filter(|t| !t.trim().is_empty()).map(num).collect::<Result<Vec<_>, _>>()?;
        if v.is_empty() {
            return Err("empty list".into());
        }
        Ok(v)
    }
}

/// A list of values parsed by [`parse_grid`].
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Grid(pub Vec<f64>);

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        parse_grid(s).map(Grid)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render a text message as a WAV file.
    Encode {
        text: String,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Decode the first packet in a WAV file and print its text.
    Decode {
        input: PathBuf,
        /// Sent text, for reporting the bit error rate.
        #[arg(long)]
        reference: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Pass a WAV file through the simulated underwater channel.
    Simulate {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// BER and recovered-text similarity against distance.
    DistanceSweep {
        /// Distances in metres: list or start:stop:step. Defaults to --distance, else 5:30:5.
        #[arg(long)]
        distances: Option<Grid>,
        /// Message pool, `purpose<TAB>text` per line. Defaults to the built-in pool.
        #[arg(long)]
        messages: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        recovery: RecovererArgs,
        #[command(flatten)]
        common: Common,
    },
    /// BER of one message against in-band SNR over an AWGN channel.
    SnrSweep {
        /// SNR values in dB: list or start:stop:step.
        #[arg(long, default_value = "-4:4:1", allow_hyphen_values = true)]
        snr: Grid,
        #[arg(long, default_value = "ascend now")]
        text: String,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Coding mode, separator protection and recoverer comparison over a BER grid.
    Ablation {
        #[arg(long, default_value = "0:0.2:0.01")]
        ber_grid: Grid,
        #[arg(long, default_value_t = 5)]
        per_message: usize,
        #[arg(long)]
        messages: Option<PathBuf>,
        #[arg(long)]
        vocab: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Generate a corrupted/original JSONL corpus.
    GenCorpus {
        #[arg(long)]
        messages: Option<PathBuf>,
        #[arg(long, default_value = "0:0.2:0.01")]
        ber_grid: Grid,
        /// Total records; BERs cycle through the grid.
        #[arg(long, conflicts_with = "per_message")]
        count: Option<usize>,
        /// Records per message per BER.
        #[arg(long)]
        per_message: Option<usize>,
        #[arg(long)]
        protect_separators: bool,
        #[arg(long)]
        out: PathBuf,
        /// Also write per-BER realized flip rates as a CSV report.
        #[arg(long)]
        audit: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Score a recoverer on a JSONL corpus.
    Evaluate {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        recovery: RecovererArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Run a recoverer on one message.
    Recover {
        text: String,
        #[arg(long, default_value = "safety")]
        purpose: PurposeTag,
        #[command(flatten)]
        recovery: RecovererArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Find the noise level giving a target BER at a distance.
    Calibrate {
        #[arg(long, default_value_t = 0.02)]
        target_ber: f64,
        #[arg(long, default_value_t = 16)]
        iterations: usize,
        #[arg(long)]
        messages: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Equalized versus unequalized BER under clock drift.
    Drift {
        /// In-band SNR, dB.
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        snr: f64,
        #[arg(long, default_value_t = 100)]
        data_symbols: usize,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Simulate a dive and write its sensor frames as CSV.
    Profile {
        /// Seconds.
        #[arg(long, default_value_t = 2400.0)]
        duration: f64,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Print the context record for one frame of a sensor CSV.
    Context {
        #[arg(long)]
        profile: PathBuf,
        /// Frame index; defaults to the last frame.
        #[arg(long)]
        frame: Option<usize>,
        #[arg(long, default_value = "safety")]
        purpose: PurposeTag,
        /// Threshold rules file; defaults to the built-in rules.
        #[arg(long)]
        thresholds: Option<PathBuf>,
        #[arg(long)]
        image: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}
