use serde::{Deserialize, Serialize};

use crate::{
    corpus::LabeledMessage,
    corruption::{corrupt_coded, CorruptionSpec},
    fec::CodingMode,
    par::{self, Execution},
    recovery::{Recoverer, SimilarityMetric, DEFAULT_SUCCESS_THRESHOLD},
    seed,
    textcodec::SymbolAlphabet,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationConfig {
    /// Error rate applied to channel-coded bits.
    pub ber_grid: Vec<f64>,
    pub modes: Vec<CodingMode>,
    pub separator_flags: Vec<bool>,
    pub per_message: usize,
    pub threshold: f64,
    pub seed: u64,
}

impl Default for AblationConfig {
    fn default() -> Self {
        Self {
            ber_grid: crate::corruption::default_ber_grid(),
            modes: vec![CodingMode::Cr0, CodingMode::Cr3],
            separator_flags: vec![false, true],
            per_message: 5,
            threshold: DEFAULT_SUCCESS_THRESHOLD,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AblationRow {
    pub ber: f64,
    pub mode: CodingMode,
    pub protect_separators: bool,
    pub recoverer: String,
    pub records: usize,
    /// Character error rate after channel decoding, before recovery.
    pub char_error_rate: f64,
    /// Half-width of the 95% confidence interval on `char_error_rate`.
    pub cer_ci95: f64,
    pub mean_similarity: f64,
    pub success_rate: f64,
}

fn char_errors(a: &str, b: &str) -> usize {
    a.chars().zip(b.chars()).filter(|(x, y)| x != y).count()
}

/// Ratio estimate of the character error rate with a 95% interval from the
/// per-record residuals.
fn cer_with_ci(errors: &[usize], lens: &[usize]) -> (f64, f64) {
    let total: usize = lens.iter().sum();
    let cer = errors.iter().sum::<usize>() as f64 / total as f64;
    let n = errors.len() as f64;
    if n < 2.0 {
        return (cer, f64::NAN);
    }
    let ss: f64 = errors.iter().zip(lens).map(|(e, l)| (*e as f64 - cer * *l as f64).powi(2)).sum();
    let se = (ss * n / (n - 1.0)).sqrt() / total as f64;
    (cer, 1.96 * se)
}

/// Corrupts every message at each (BER, mode, separator flag) and scores each
/// recoverer. Record `i` draws the same bit flips in every cell, so cells are
/// paired.
pub fn ablation(
    messages: &[LabeledMessage],
    cfg: &AblationConfig,
    recoverers: &[&dyn Recoverer],
    metric: &dyn SimilarityMetric,
    alphabet: &SymbolAlphabet,
    exec: Execution,
) -> crate::Result<Vec<AblationRow>> {
    if messages.is_empty() {
        return Err(crate::corruption::CorruptionError::EmptyInput.into());
    }
    let n = messages.len() * cfg.per_message.max(1);
    let serial = !metric.concurrent() || recoverers.iter().any(|r| !r.concurrent());
    let exec = if serial { Execution::Sequential } else { exec };
    let mut rows = Vec::new();
    for &ber in &cfg.ber_grid {
        for &mode in &cfg.modes {
            for &protect in &cfg.separator_flags {
                let corrupted = par::map_range(n, exec, |i| {
                    let msg = &messages[i % messages.len()];
                    let spec = CorruptionSpec::new(ber, protect, seed::derive(cfg.seed, seed::stream::CORRUPTION, i as u64))?;
                    corrupt_coded(&msg.text, &spec, mode, alphabet)
                })
                .into_iter()
                .collect::<Result<Vec<String>, _>>()?;
                let originals: Vec<&LabeledMessage> = (0..n).map(|i| &messages[i % messages.len()]).collect();
                let errors: Vec<usize> =
                    corrupted.iter().zip(&originals).map(|(c, m)| char_errors(c, &m.text)).collect();
                let lens: Vec<usize> = originals.iter().map(|m| m.text.chars().count()).collect();
                let (cer, ci) = cer_with_ci(&errors, &lens);
                for rec in recoverers {
                    let scores = par::map_range(n, exec, |i| -> crate::Result<f64> {
                        let out = rec.recover(&corrupted[i], originals[i].purpose)?;
                        Ok(metric.similarity(&out, &originals[i].text)?)
                    })
                    .into_iter()
                    .collect::<crate::Result<Vec<f64>>>()?;
                    rows.push(AblationRow {
                        ber,
                        mode,
                        protect_separators: protect,
                        recoverer: rec.name().to_string(),
                        records: n,
                        char_error_rate: cer,
                        cer_ci95: ci,
                        mean_similarity: scores.iter().sum::<f64>() / n as f64,
                        success_rate: scores.iter().filter(|s| **s >= cfg.threshold).count() as f64 / n as f64,
                    });
                }
            }
        }
    }
    Ok(rows)
}
