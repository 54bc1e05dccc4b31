//! Run settings: defaults, then an optional TOML file, then flags.

use std::path::Path;

use aquamodem::{channel::ChannelParams, fec::CodingMode, phy::ModulationParams, recovery::DEFAULT_SUCCESS_THRESHOLD};
use serde::{Deserialize, Serialize};

use crate::{args::Common, exit::CliError};

/// Everything a command needs to reproduce its run. Written into report
/// sidecars.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    pub modulation: ModulationParams,
    pub mode: CodingMode,
    pub seed: u64,
    pub trials: usize,
    pub threshold: f64,
    pub channel: ChannelParams,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            modulation: ModulationParams::default(),
            mode: CodingMode::Cr3,
            seed: 0,
            trials: 100,
            threshold: DEFAULT_SUCCESS_THRESHOLD,
            channel: ChannelParams::default(),
        }
    }
}

impl Settings {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn resolve(common: &Common) -> Result<Self, CliError> {
        let mut s = match &common.config {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        let m = &mut s.modulation;
        if let Some(v) = common.sf {
            m.sf = v;
        }
        if let Some(v) = common.bw {
            m.bw = v;
        }
        if let Some(v) = common.fc {
            m.fc = v;
            s.channel.carrier_hz = v;
        }
        if let Some(v) = common.fs {
            m.fs = v;
        }
        if let Some(v) = common.mode {
            s.mode = v;
        }
        if let Some(v) = common.seed {
            s.seed = v;
            s.channel.seed = v;
        }
        if let Some(v) = common.trials {
            s.trials = v;
        }
        if let Some(v) = common.threshold {
            s.threshold = v;
        }
        if let Some(v) = common.distance {
            s.channel.distance = v;
        }
        if let Some(v) = common.noise {
            s.channel.noise_level = v;
        }
        if let Some(v) = common.drift_ppm {
            s.channel.drift_ppm = v;
        }
        s.modulation.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        s.channel.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        if !(0.0..=1.0).contains(&s.threshold) {
            return Err(CliError::Usage(format!("threshold {} is outside [0, 1]", s.threshold)));
        }
        Ok(s)
    }
}
