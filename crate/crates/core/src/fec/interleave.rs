use crate::bits::BitString;

use super::FecError;

/// Block interleaver: write row-major into `rows x cols`, read column-major.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InterleaverConfig {
    pub rows: usize,
    pub cols: usize,
}

impl InterleaverConfig {
    pub fn len(self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(self) -> bool {
        self.len() == 0
    }

    fn check(self, bits: &BitString) -> Result<(), FecError> {
        if self.rows == 0 || self.cols == 0 {
            return Err(FecError::InvalidShape { rows: self.rows, cols: self.cols });
        }
        if bits.len() != self.len() {
            return Err(FecError::LengthMismatch { expected: self.len(), actual: bits.len() });
        }
        Ok(())
    }
}

pub fn interleave(bits: &BitString, cfg: InterleaverConfig) -> Result<BitString, FecError> {
    cfg.check(bits)?;
    let mut out = BitString::with_capacity(bits.len());
    for c in 0..cfg.cols {
        for r in 0..cfg.rows {
            out.push(bits[r * cfg.cols + c]);
        }
    }
    Ok(out)
}

pub fn deinterleave(bits: &BitString, cfg: InterleaverConfig) -> Result<BitString, FecError> {
    cfg.check(bits)?;
    let mut out = vec![false; bits.len()];
    for (j, b) in bits.iter().enumerate() {
        let (c, r) = (j / cfg.rows, j % cfg.rows);
        out[r * cfg.cols + c] = b;
    }
    Ok(out.into())
}
