use std::{collections::HashSet, path::Path, sync::OnceLock};

use super::CodecError;

pub const BITS_PER_CHAR: usize = 5;
const SIZE: usize = 1 << BITS_PER_CHAR;

/// 32 distinct characters; a character's position is its 5-bit code.
///
/// The default set is `a`..`z`, space, `.`, `,`, `?`, `!` and `'` in that order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolAlphabet {
    entries: [char; SIZE],
    ascii: [Option<u8>; 128],
}

impl SymbolAlphabet {
    pub fn new(entries: [char; SIZE]) -> Result<Self, CodecError> {
        let distinct: HashSet<char> = entries.iter().copied().collect();
        if distinct.len() != SIZE {
            return Err(CodecError::InvalidAlphabet("entries must be distinct".into()));
        }
        if let Some(missing) = ('a'..='z').chain([' ']).find(|c| !distinct.contains(c)) {
            return Err(CodecError::InvalidAlphabet(format!("missing required {missing:?}")));
        }
        let mut ascii = [None; 128];
        for (i, &c) in entries.iter().enumerate() {
            if c.is_ascii() {
                ascii[c as usize] = Some(i as u8);
            }
        }
        Ok(Self { entries, ascii })
    }

    pub fn default_ref() -> &'static SymbolAlphabet {
        static DEFAULT: OnceLock<SymbolAlphabet> = OnceLock::new();
        DEFAULT.get_or_init(SymbolAlphabet::default)
    }

    pub fn entries(&self) -> &[char; SIZE] {
        &self.entries
    }

    pub fn index_of(&self, c: char) -> Option<u8> {
        if c.is_ascii() {
            self.ascii[c as usize]
        } else {
            self.entries.iter().position(|&e| e == c).map(|i| i as u8)
        }
    }

    /// Character for a 5-bit index; only the low five bits are used.
    pub fn char_at(&self, index: u8) -> char {
        self.entries[(index as usize) & (SIZE - 1)]
    }

    pub fn space_index(&self) -> u8 {
        self.index_of(' ').expect("alphabet always contains space")
    }

    /// One character per line, line number = index.
    pub fn to_file_string(&self) -> String {
        let mut s = String::with_capacity(SIZE * 2);
        for c in self.entries {
            s.push(c);
            s.push('\n');
        }
        s
    }

    pub fn from_file_string(s: &str) -> Result<Self, CodecError> {
        let lines: Vec<&str> = s.strip_suffix('\n').unwrap_or(s).split('\n').collect();
        if lines.len() != SIZE {
            return Err(CodecError::InvalidAlphabet(format!(
                "expected {SIZE} lines, found {}",
                lines.len()
            )));
        }
        let mut entries = [' '; SIZE];
        for (i, line) in lines.iter().enumerate() {
            let line = line.strip_suffix('\r').unwrap_or(line);
            let mut chars = line.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => entries[i] = c,
                _ => {
                    return Err(CodecError::InvalidAlphabet(format!(
                        "line {} must hold exactly one character",
                        i + 1
                    )))
                }
            }
        }
        Self::new(entries)
    }

    pub fn load(path: &Path) -> crate::Result<Self> {
        Ok(Self::from_file_string(&std::fs::read_to_string(path)?)?)
    }

    pub fn save(&self, path: &Path) -> crate::Result<()> {
        std::fs::write(path, self.to_file_string())?;
        Ok(())
    }
}

impl Default for SymbolAlphabet {
    fn default() -> Self {
        let mut entries = [' '; SIZE];
        for (i, c) in ('a'..='z').chain([' ', '.', ',', '?', '!', '\'']).enumerate() {
            entries[i] = c;
        }
        Self::new(entries).expect("default alphabet is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_layout() {
        let a = SymbolAlphabet::default();
        assert_eq!(a.index_of('a'), Some(0));
        assert_eq!(a.index_of('z'), Some(25));
        assert_eq!(a.space_index(), 26);
        assert_eq!(a.char_at(31), '\'');
        assert_eq!(a.index_of('A'), None);
        assert_eq!(a.index_of('é'), None);
    }

    #[test]
    fn file_format_round_trip() {
        let a = SymbolAlphabet::default();
        let s = a.to_file_string();
        assert_eq!(s.lines().count(), 32);
        assert_eq!(s.lines().nth(26), Some(" "));
        assert_eq!(SymbolAlphabet::from_file_string(&s).unwrap(), a);
    }

    #[test]
    fn rejects_bad_alphabets() {
        let mut e = *SymbolAlphabet::default().entries();
        e[27] = 'a';
        assert!(SymbolAlphabet::new(e).is_err());
        let mut e = *SymbolAlphabet::default().entries();
        e[26] = '-';
        assert!(SymbolAlphabet::new(e).is_err());
        assert!(SymbolAlphabet::from_file_string("a\nb\n").is_err());
    }
}
