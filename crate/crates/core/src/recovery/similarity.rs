use std::collections::HashMap;

use super::RecoveryError;

/// Scores how alike two messages are, in [0, 1].
pub trait SimilarityMetric: Send + Sync {
    fn similarity(&self, a: &str, b: &str) -> Result<f64, RecoveryError>;

    fn concurrent(&self) -> bool {
        true
    }
}

/// Mean of token-bag cosine similarity and normalized character edit
/// similarity, after collapsing whitespace.
#[derive(Clone, Copy, Debug, Default)]
pub struct HybridSimilarity;

impl SimilarityMetric for HybridSimilarity {
    fn similarity(&self, a: &str, b: &str) -> Result<f64, RecoveryError> {
        Ok(similarity(a, b))
    }
}

fn tidy(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn token_cosine(a: &str, b: &str) -> f64 {
    let mut counts: HashMap<&str, (f64, f64)> = HashMap::new();
    for t in a.split(' ') {
        counts.entry(t).or_default().0 += 1.0;
    }
    for t in b.split(' ') {
        counts.entry(t).or_default().1 += 1.0;
    }
    let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
    for (x, y) in counts.values() {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    dot / (na.sqrt() * nb.sqrt())
}

/// The default metric. Equal (after whitespace collapsing) strings score 1;
/// an empty string against a non-empty one scores 0.
pub fn similarity(a: &str, b: &str) -> f64 {
    let (a, b) = (tidy(a), tidy(b));
    if a == b {
        return 1.0;
    }
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let max_len = a.chars().count().max(b.chars().count()) as f64;
    let edit = 1.0 - strsim::levenshtein(&a, &b) as f64 / max_len;
    (0.5 * (token_cosine(&a, &b) + edit)).clamp(0.0, 1.0)
}
