//! Band-limited resampling for clock drift.

use std::{f64::consts::PI, sync::OnceLock};

const HALF_TAPS: usize = 16;
const PHASES: usize = 1024;

/// Blackman-windowed sinc kernel sampled at `PHASES` fractional offsets.
/// Row `p` holds weights for taps `-HALF_TAPS+1 ..= HALF_TAPS` at fraction
/// `p / PHASES`.
fn kernel() -> &'static [[f64; 2 * HALF_TAPS]] {
    static TABLE: OnceLock<Vec<[f64; 2 * HALF_TAPS]>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (0..=PHASES)
            .map(|p| {
                let frac = p as f64 / PHASES as f64;
                let mut row = [0.0; 2 * HALF_TAPS];
                for (i, w) in row.iter_mut().enumerate() {
                    let d = frac - (i as f64 - (HALF_TAPS as f64 - 1.0));
                    let sinc = if d.abs() < 1e-12 { 1.0 } else { (PI * d).sin() / (PI * d) };
                    let x = (d / HALF_TAPS as f64 + 1.0) / 2.0;
                    let win = if (0.0..=1.0).contains(&x) {
                        0.42 - 0.5 * (2.0 * PI * x).cos() + 0.08 * (4.0 * PI * x).cos()
                    } else {
                        0.0
                    };
                    *w = sinc * win;
                }
                row
            })
            .collect()
    })
}

/// Returns `y[m] = x(m * ratio)` using windowed-sinc interpolation.
/// `ratio > 1` shortens the signal.
pub fn resample(x: &[f64], ratio: f64) -> Vec<f64> {
    assert!(ratio > 0.0, "resampling ratio must be positive");
    if x.is_empty() {
        return Vec::new();
    }
    if ratio == 1.0 {
        return x.to_vec();
    }
    let table = kernel();
    let out_len = ((x.len() - 1) as f64 / ratio).floor() as usize + 1;
    let h = HALF_TAPS as i64;
    (0..out_len)
        .map(|m| {
            let t = m as f64 * ratio;
            let base = t.floor();
            let frac = t - base;
            let pf = frac * PHASES as f64;
            let p = (pf.floor() as usize).min(PHASES - 1);
            let w = pf - p as f64;
            let (r0, r1) = (&table[p], &table[p + 1]);
            let i0 = base as i64 - (h - 1);
            let mut acc = 0.0;
            for k in 0..2 * HALF_TAPS {
                let idx = i0 + k as i64;
                if idx >= 0 && (idx as usize) < x.len() {
                    acc += x[idx as usize] * (r0[k] + w * (r1[k] - r0[k]));
                }
            }
            acc
        })
        .collect()
}
