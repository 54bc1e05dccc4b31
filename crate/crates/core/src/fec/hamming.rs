//! Systematic Hamming(7,4): codeword bits are `d1 d2 d3 d4 p1 p2 p3` with
//! `p1 = d1^d2^d4`, `p2 = d1^d3^d4`, `p3 = d2^d3^d4`.

pub const DATA_BITS: usize = 4;
pub const CODEWORD_BITS: usize = 7;

/// A 7-bit word, first transmitted bit in bit 6.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Codeword(u8);

impl Codeword {
    pub fn from_bits(bits: u8) -> Self {
        Self(bits & 0x7f)
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn data(self) -> u8 {
        self.0 >> 3
    }

    /// Bit at position `i` (0 = first transmitted).
    pub fn bit(self, i: usize) -> bool {
        (self.0 >> (CODEWORD_BITS - 1 - i)) & 1 == 1
    }

    pub fn flipped(self, i: usize) -> Self {
        Self(self.0 ^ (1 << (CODEWORD_BITS - 1 - i)))
    }

    /// Three-bit syndrome `s1 s2 s3`; zero for valid codewords.
    pub fn syndrome(self) -> u8 {
        let b = |i| self.bit(i) as u8;
        let (d1, d2, d3, d4, p1, p2, p3) = (b(0), b(1), b(2), b(3), b(4), b(5), b(6));
        let s1 = d1 ^ d2 ^ d4 ^ p1;
        let s2 = d1 ^ d3 ^ d4 ^ p2;
        let s3 = d2 ^ d3 ^ d4 ^ p3;
        (s1 << 2) | (s2 << 1) | s3
    }

    pub fn is_valid(self) -> bool {
        self.syndrome() == 0
    }
}

/// Error position for each syndrome value (columns of the parity-check matrix).
const SYNDROME_POSITION: [Option<usize>; 8] = [
    None,    // 000
    Some(6), // 001 -> p3
    Some(5), // 010 -> p2
    Some(2), // 011 -> d3
    Some(4), // 100 -> p1
    Some(1), // 101 -> d2
    Some(0), // 110 -> d1
    Some(3), // 111 -> d4
];

/// Encodes the low four bits of `data` (d1 in bit 3).
pub fn hamming_encode(data: u8) -> Codeword {
    let d = |i: u8| (data >> (3 - i)) & 1;
    let (d1, d2, d3, d4) = (d(0), d(1), d(2), d(3));
    let p1 = d1 ^ d2 ^ d4;
    let p2 = d1 ^ d3 ^ d4;
    let p3 = d2 ^ d3 ^ d4;
    Codeword(((data & 0xf) << 3) | (p1 << 2) | (p2 << 1) | p3)
}

/// Syndrome decoding. Returns the data nibble and whether a bit was flipped.
/// Two or more errors are silently miscorrected.
pub fn hamming_decode(word: Codeword) -> (u8, bool) {
    match SYNDROME_POSITION[word.syndrome() as usize] {
        None => (word.data(), false),
        Some(pos) => (word.flipped(pos).data(), true),
    }
}
