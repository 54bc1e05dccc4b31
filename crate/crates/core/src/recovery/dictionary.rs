use std::path::Path;

use super::{RecoveryError, Recoverer};
use crate::{
    context::PurposeTag,
    textcodec::{SymbolAlphabet, BITS_PER_CHAR},
};

/// Replaces each out-of-vocabulary token with the vocabulary word whose 5-bit
/// encoding is nearest in Hamming distance. Ties go to the earlier word.
#[derive(Clone, Debug)]
pub struct DictionaryRecoverer {
    words: Vec<String>,
    codes: Vec<Vec<u8>>,
    alphabet: SymbolAlphabet,
}

impl DictionaryRecoverer {
    pub fn new(words: Vec<String>) -> Result<Self, RecoveryError> {
        Self::with_alphabet(words, SymbolAlphabet::default_ref().clone())
    }

    /// Words containing characters outside `alphabet` are dropped.
    pub fn with_alphabet(words: Vec<String>, alphabet: SymbolAlphabet) -> Result<Self, RecoveryError> {
        let mut kept = Vec::new();
        let mut codes = Vec::new();
        for w in words {
            let w = w.trim().to_string();
            if w.is_empty() || w.contains(' ') || kept.contains(&w) {
                continue;
            }
            if let Some(c) = encode(&w, &alphabet) {
                kept.push(w);
                codes.push(c);
            }
        }
        if kept.is_empty() {
            return Err(RecoveryError::EmptyVocabulary);
        }
        Ok(Self { words: kept, codes, alphabet })
    }

    /// Reads a vocabulary file with one word per line.
    pub fn from_file(path: &Path) -> Result<Self, RecoveryError> {
        let text = std::fs::read_to_string(path)?;
        Self::new(text.lines().map(str::to_string).collect())
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn contains(&self, token: &str) -> bool {
        self.words.iter().any(|w| w == token)
    }

    /// Index of the nearest vocabulary word to `token`.
    pub fn nearest(&self, token: &str) -> usize {
        let code: Vec<u8> = token.chars().map(|c| self.alphabet.index_of(c).unwrap_or(0)).collect();
        let mut best = (usize::MAX, 0);
        for (i, w) in self.codes.iter().enumerate() {
            let d = code_distance(&code, w);
            if d < best.0 {
                best = (d, i);
            }
        }
        best.1
    }
}

fn encode(word: &str, alphabet: &SymbolAlphabet) -> Option<Vec<u8>> {
    word.chars().map(|c| alphabet.index_of(c)).collect()
}

/// Bit differences over the shared prefix, plus 5 bits per unmatched
/// character.
pub(crate) fn code_distance(a: &[u8], b: &[u8]) -> usize {
    let shared: u32 = a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones()).sum();
    shared as usize + BITS_PER_CHAR * a.len().abs_diff(b.len())
}

impl Recoverer for DictionaryRecoverer {
    fn name(&self) -> &str {
        "dictionary"
    }

    fn recover(&self, corrupted: &str, _purpose: PurposeTag) -> Result<String, RecoveryError> {
        let tokens: Vec<&str> = corrupted
            .split(' ')
            .map(|t| if t.is_empty() || self.contains(t) { t } else { self.words[self.nearest(t)].as_str() })
            .collect();
        Ok(tokens.join(" "))
    }
}
