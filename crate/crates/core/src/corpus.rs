//! Message pools and vocabularies.
//!
//! Message files hold one message per line, either `purpose<TAB>text` or bare
//! text. Bare lines get a purpose drawn from the seed. Blank lines and lines
//! starting with `#` are skipped.

use std::{collections::HashSet, path::Path, sync::OnceLock};

use rand::RngExt;
use serde::{Deserialize, Serialize};

use crate::{context::PurposeTag, seed, textcodec};

const DEFAULT_MESSAGES: &str = include_str!("../data/messages.tsv");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledMessage {
    /// Normalized text.
    pub text: String,
    pub purpose: PurposeTag,
}

pub fn parse_messages(src: &str, seed: u64) -> crate::Result<Vec<LabeledMessage>> {
    let mut out = Vec::new();
    for (i, line) in src.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let (purpose, raw) = match line.split_once('\t') {
            Some((p, t)) => (p.parse::<PurposeTag>()?, t),
            None => {
                let mut rng = seed::derived_rng(seed, seed::stream::PURPOSE, i as u64);
                (PurposeTag::ALL[rng.random_range(0..PurposeTag::ALL.len())], line)
            }
        };
        out.push(LabeledMessage { text: textcodec::normalize_message(raw)?, purpose });
    }
    Ok(out)
}

pub fn load_messages(path: &Path, seed: u64) -> crate::Result<Vec<LabeledMessage>> {
    parse_messages(&std::fs::read_to_string(path)?, seed)
}

/// The built-in pool of diver messages.
pub fn default_messages() -> &'static [LabeledMessage] {
    static POOL: OnceLock<Vec<LabeledMessage>> = OnceLock::new();
    POOL.get_or_init(|| parse_messages(DEFAULT_MESSAGES, 0).expect("built-in messages parse"))
}

/// Distinct space-separated tokens in first-appearance order.
pub fn vocabulary<'a>(texts: impl IntoIterator<Item = &'a str>) -> Vec<String> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for t in texts {
        for w in t.split(' ').filter(|w| !w.is_empty()) {
            if seen.insert(w) {
                out.push(w.to_string());
            }
        }
    }
    out
}

pub fn default_vocabulary() -> &'static [String] {
    static VOCAB: OnceLock<Vec<String>> = OnceLock::new();
    VOCAB.get_or_init(|| vocabulary(default_messages().iter().map(|m| m.text.as_str())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_pool_is_normalized_and_covers_all_purposes() {
        let pool = default_messages();
        assert!(pool.len() >= 140);
        let alpha = textcodec::SymbolAlphabet::default_ref();
        for m in pool {
            assert!(m.text.chars().all(|c| alpha.index_of(c).is_some()), "{}", m.text);
        }
        for p in PurposeTag::ALL {
            assert!(pool.iter().any(|m| m.purpose == p), "{p}");
        }
        assert!(pool.iter().any(|m| m.text == "my tank is at six hundred psi"));
    }

    #[test]
    fn bare_lines_get_seeded_purposes() {
        let src = "# comment\n\nhello there\nsafety\tgo up\n";
        let a = parse_messages(src, 7).unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a[1], LabeledMessage { text: "go up".into(), purpose: PurposeTag::Safety });
        assert_eq!(parse_messages(src, 7).unwrap(), a);
        assert!(parse_messages("bogus\ttext", 0).is_err());
    }

    #[test]
    fn vocabulary_is_ordered_and_unique() {
        assert_eq!(vocabulary(["go up now", "go down"]), ["go", "up", "now", "down"]);
        assert!(default_vocabulary().len() > 200);
    }
}
