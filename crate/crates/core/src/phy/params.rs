use serde::{Deserialize, Serialize};

use super::PhyError;

/// Chirp spread spectrum parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModulationParams {
    /// Spreading factor: bits per chirp symbol.
    pub sf: u32,
    /// Chirp bandwidth in Hz.
    pub bw: f64,
    /// Carrier centre frequency in Hz.
    pub fc: f64,
    /// Sample rate in Hz.
    pub fs: f64,
}

impl Default for ModulationParams {
    fn default() -> Self {
        Self { sf: 5, bw: 2000.0, fc: 11_000.0, fs: 48_000.0 }
    }
}

impl ModulationParams {
    pub fn validate(&self) -> Result<(), PhyError> {
        let bad = |why: String| Err(PhyError::InvalidParams(why));
        if !(1..=12).contains(&self.sf) {
            return bad(format!("spreading factor {} outside 1..=12", self.sf));
        }
        if !(self.bw > 0.0 && self.fc > 0.0 && self.fs > 0.0) {
            return bad("bandwidth, carrier and sample rate must be positive".into());
        }
        if self.fc - self.bw / 2.0 <= 0.0 {
            return bad("chirp band extends below 0 Hz".into());
        }
        if self.fs < 2.0 * (self.fc + self.bw / 2.0) {
            return bad(format!(
                "sample rate {} Hz cannot represent {} Hz",
                self.fs,
                self.fc + self.bw / 2.0
            ));
        }
        let exact = self.fs * self.symbol_count() as f64 / self.bw;
        if (exact - exact.round()).abs() > 1e-9 {
            return bad(format!("fs * 2^sf / bw = {exact} is not a whole number of samples"));
        }
        Ok(())
    }

    /// Number of distinct symbols, `2^sf`.
    pub fn symbol_count(&self) -> usize {
        1 << self.sf
    }

    /// Symbol duration in seconds, `2^sf / bw`.
    pub fn symbol_duration(&self) -> f64 {
        self.symbol_count() as f64 / self.bw
    }

    /// Uncoded bit rate in bits per second, `sf * bw / 2^sf`.
    pub fn raw_bit_rate(&self) -> f64 {
        self.sf as f64 * self.bw / self.symbol_count() as f64
    }

    pub fn samples_per_symbol(&self) -> usize {
        (self.fs * self.symbol_count() as f64 / self.bw).round() as usize
    }

    /// Samples per chip, `fs / bw`.
    pub fn samples_per_chip(&self) -> f64 {
        self.fs / self.bw
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_rates() {
        let p = ModulationParams::default();
        p.validate().unwrap();
        assert_eq!(p.symbol_count(), 32);
        assert_eq!(p.symbol_duration(), 0.016);
        assert_eq!(p.raw_bit_rate(), 312.5);
        assert_eq!(p.samples_per_symbol(), 768);
        assert_eq!(p.samples_per_chip(), 24.0);
    }

    #[test]
    fn rejects_undersampling_and_fractional_symbols() {
        let p = ModulationParams { fs: 20_000.0, ..Default::default() };
        assert!(p.validate().is_err());
        let p = ModulationParams { fs: 44_100.0, ..Default::default() };
        assert!(p.validate().is_err());
        let p = ModulationParams { sf: 0, ..Default::default() };
        assert!(p.validate().is_err());
    }
}
