//! Text normalization and the 5-bit character codec.

mod alphabet;
mod numbers;

pub use alphabet::{SymbolAlphabet, BITS_PER_CHAR};
pub use numbers::{integer_to_words, number_to_words};

use std::sync::OnceLock;

use regex::{Captures, Regex};
use thiserror::Error;

use crate::bits::BitString;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("message has no representable content after normalization")]
    EmptyAfterNormalization,
    #[error("character {ch:?} at position {position} is not in the alphabet")]
    UnsupportedCharacter { position: usize, ch: char },
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
}

fn numeric_token() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(\d{1,3}(?:,\d{3})+|\d+)(?:\.(\d+))?").expect("static regex"))
}

/// Replacement text for characters outside the alphabet. `None` drops the
/// character.
fn substitute(c: char) -> Option<&'static str> {
    match c {
        c if c.is_whitespace() => Some(" "),
        '-' | '_' | '/' | '\\' | '(' | ')' | '[' | ']' => Some(" "),
        ':' | ';' => Some(","),
        '%' => Some(" percent "),
        '&' => Some(" and "),
        '+' => Some(" plus "),
        '°' => Some(" degrees "),
        '’' | '‘' | '`' => Some("'"),
        '…' => Some("."),
        _ => None,
    }
}

/// Normalizes raw message text with the default alphabet.
pub fn normalize_message(raw: &str) -> Result<String, CodecError> {
    normalize_with(raw, SymbolAlphabet::default_ref())
}

/// Lowercases, spells out numerals, maps or drops characters the alphabet
/// lacks, and collapses runs of spaces.
pub fn normalize_with(raw: &str, alphabet: &SymbolAlphabet) -> Result<String, CodecError> {
    let spelled = numeric_token().replace_all(raw, |caps: &Captures<'_>| {
        let whole = caps.get(0).expect("group 0");
        let int_part = caps[1].replace(',', "");
        let words = number_to_words(&int_part, caps.get(2).map(|m| m.as_str()));
        let before = raw[..whole.start()].chars().next_back();
        let after = raw[whole.end()..].chars().next();
        let mut out = String::with_capacity(words.len() + 2);
        if before.is_some_and(char::is_alphanumeric) {
            out.push(' ');
        }
        out.push_str(&words);
        if after.is_some_and(char::is_alphanumeric) {
            out.push(' ');
        }
        out
    });

    let mut mapped = String::with_capacity(spelled.len());
    let mut dropped = Vec::new();
    for c in spelled.chars().flat_map(char::to_lowercase) {
        if alphabet.index_of(c).is_some() {
            mapped.push(c);
        } else if let Some(sub) = substitute(c) {
            mapped.push_str(sub);
        } else {
            dropped.push(c);
        }
    }
    if !dropped.is_empty() {
        log::warn!("dropped characters with no alphabet mapping: {dropped:?}");
    }

    let text = mapped.split(' ').filter(|w| !w.is_empty()).collect::<Vec<_>>().join(" ");
    // Substitutions may have produced characters the alphabet lacks (e.g. a
    // custom alphabet without ','), so filter once more.
    let text: String = text.chars().filter(|&c| alphabet.index_of(c).is_some()).collect();
    let text = text.trim().to_string();
    if text.is_empty() {
        return Err(CodecError::EmptyAfterNormalization);
    }
    Ok(text)
}

/// Encodes each character as the big-endian 5-bit binary of its alphabet index.
pub fn encode_text(text: &str, alphabet: &SymbolAlphabet) -> Result<BitString, CodecError> {
    let mut bits = BitString::with_capacity(text.len() * BITS_PER_CHAR);
    for (position, ch) in text.chars().enumerate() {
        let idx = alphabet
            .index_of(ch)
            .ok_or(CodecError::UnsupportedCharacter { position, ch })?;
        bits.push_uint(idx as u64, BITS_PER_CHAR);
    }
    Ok(bits)
}

/// Decodes 5-bit groups; a trailing partial group is discarded.
pub fn decode_bits(bits: &BitString, alphabet: &SymbolAlphabet) -> String {
    (0..bits.len() / BITS_PER_CHAR)
        .map(|i| alphabet.char_at(bits.read_uint(i * BITS_PER_CHAR, BITS_PER_CHAR) as u8))
        .collect()
}
