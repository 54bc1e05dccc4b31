//! Packet layout: preamble, Hamming-protected header, then data symbols with
//! a known training symbol after every three.

use crate::{
    bits::BitString,
    fec::{self, gray_map, CodingMode},
};

use super::{Chirps, ModulationParams, PhyError, Waveform};

pub const PREAMBLE_UP: usize = 6;
pub const PREAMBLE_DOWN: usize = 2;
pub const TRAINING_CADENCE: usize = 3;
pub const TRAINING_SYMBOL: u32 = 0;
pub const HEADER_BITS: usize = 32;

/// Decoded header contents.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FrameHeader {
    pub payload_bit_length: usize,
    pub mode: CodingMode,
}

fn crc8(bytes: &[u8]) -> u8 {
    let mut crc = 0u8;
    for &b in bytes {
        crc ^= b;
        for _ in 0..8 {
            crc = if crc & 0x80 != 0 { (crc << 1) ^ 0x07 } else { crc << 1 };
        }
    }
    crc
}

impl FrameHeader {
    pub const MAX_PAYLOAD_BITS: usize = u16::MAX as usize;

    /// 32-bit field: 16-bit payload length, 8-bit mode code, CRC-8 of both.
    pub fn to_bits(&self) -> BitString {
        let len = self.payload_bit_length as u16;
        let bytes = [(len >> 8) as u8, len as u8, self.mode.code()];
        let mut bits = BitString::with_capacity(HEADER_BITS);
        for b in bytes.iter().chain([crc8(&bytes)].iter()) {
            bits.push_uint(*b as u64, 8);
        }
        bits
    }

    pub fn from_bits(bits: &BitString) -> Result<Self, PhyError> {
        if bits.len() < HEADER_BITS {
            return Err(PhyError::HeaderDecodeFailed("short header".into()));
        }
        let bytes: Vec<u8> = (0..4).map(|i| bits.read_uint(i * 8, 8) as u8).collect();
        if crc8(&bytes[..3]) != bytes[3] {
            return Err(PhyError::HeaderDecodeFailed("checksum mismatch".into()));
        }
        let mode = CodingMode::from_code(bytes[2])
            .ok_or_else(|| PhyError::HeaderDecodeFailed(format!("unknown mode {}", bytes[2])))?;
        let payload_bit_length = ((bytes[0] as usize) << 8) | bytes[1] as usize;
        Ok(Self { payload_bit_length, mode })
    }
}

/// Symbol budget of one packet.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FramePlan {
    pub preamble_up: usize,
    pub preamble_down: usize,
    pub training_cadence: usize,
    pub header_symbols: usize,
    /// Data symbols, excluding training symbols.
    pub payload_symbol_count: usize,
    /// Codec bits before channel coding and padding.
    pub payload_bit_length: usize,
    pub mode: CodingMode,
}

/// Symbols needed to carry the always-coded header.
pub fn header_symbols(sf: u32) -> usize {
    CodingMode::Cr3.coded_len(HEADER_BITS).div_ceil(sf as usize)
}

impl FramePlan {
    pub fn new(payload_bit_length: usize, mode: CodingMode, sf: u32) -> Self {
        Self {
            preamble_up: PREAMBLE_UP,
            preamble_down: PREAMBLE_DOWN,
            training_cadence: TRAINING_CADENCE,
            header_symbols: header_symbols(sf),
            payload_symbol_count: mode.coded_len(payload_bit_length).div_ceil(sf as usize),
            payload_bit_length,
            mode,
        }
    }

    pub fn from_header(header: &FrameHeader, sf: u32) -> Self {
        Self::new(header.payload_bit_length, header.mode, sf)
    }

    pub fn header(&self) -> FrameHeader {
        FrameHeader { payload_bit_length: self.payload_bit_length, mode: self.mode }
    }

    pub fn preamble_symbols(&self) -> usize {
        self.preamble_up + self.preamble_down
    }

    pub fn training_symbols(&self) -> usize {
        self.payload_symbol_count / self.training_cadence
    }

    /// Data plus training symbols after the header.
    pub fn payload_stream_symbols(&self) -> usize {
        self.payload_symbol_count + self.training_symbols()
    }

    pub fn total_symbols(&self) -> usize {
        self.preamble_symbols() + self.header_symbols + self.payload_stream_symbols()
    }

    pub fn coded_bit_length(&self) -> usize {
        self.mode.coded_len(self.payload_bit_length)
    }

    pub fn duration(&self, params: &ModulationParams) -> f64 {
        self.total_symbols() as f64 * params.symbol_duration()
    }
}

/// One transmitted symbol slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    PreambleUp,
    SyncDown,
    Header(u32),
    Data(u32),
    Training,
}

/// Splits bits into big-endian `sf`-bit symbol indices, zero-padding the tail.
pub fn bits_to_symbols(bits: &BitString, sf: u32, gray: bool) -> Vec<u32> {
    let sf = sf as usize;
    let mut padded = bits.clone();
    padded.pad_to_multiple(sf);
    (0..padded.len() / sf)
        .map(|i| {
            let v = padded.read_uint(i * sf, sf) as u32;
            if gray {
                gray_map(v, sf as u32).expect("value fits in sf bits")
            } else {
                v
            }
        })
        .collect()
}

/// Encoded header symbols (Hamming + interleave, Gray-mapped).
pub fn header_symbol_indices(header: &FrameHeader, sf: u32) -> Vec<u32> {
    bits_to_symbols(&fec::hamming_block_encode(&header.to_bits()), sf, true)
}

/// Symbol slots of a packet carrying `coded_bits` (already channel coded).
pub fn frame_slots(coded_bits: &BitString, plan: &FramePlan, sf: u32) -> Vec<Slot> {
    let mut slots = Vec::with_capacity(plan.total_symbols());
    slots.extend(std::iter::repeat_n(Slot::PreambleUp, plan.preamble_up));
    slots.extend(std::iter::repeat_n(Slot::SyncDown, plan.preamble_down));
    slots.extend(header_symbol_indices(&plan.header(), sf).into_iter().map(Slot::Header));
    let data = bits_to_symbols(coded_bits, sf, plan.mode.uses_gray());
    debug_assert_eq!(data.len(), plan.payload_symbol_count);
    for (i, k) in data.into_iter().enumerate() {
        slots.push(Slot::Data(k));
        if (i + 1) % plan.training_cadence == 0 {
            slots.push(Slot::Training);
        }
    }
    slots
}

/// Renders a packet to passband audio.
pub fn frame(coded_bits: &BitString, chirps: &Chirps, plan: &FramePlan) -> Waveform {
    let sf = chirps.params().sf;
    let slots = frame_slots(coded_bits, plan, sf);
    let len = chirps.symbol_len();
    let mut samples = Vec::with_capacity(slots.len() * len);
    for slot in slots {
        let s = match slot {
            Slot::PreambleUp | Slot::Training => chirps.symbol(TRAINING_SYMBOL),
            Slot::SyncDown => Ok(chirps.down_chirp()),
            Slot::Header(k) | Slot::Data(k) => chirps.symbol(k),
        };
        samples.extend_from_slice(s.expect("symbol indices are sf-bit"));
    }
    Waveform::new(samples, chirps.params().fs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_round_trip_and_checksum() {
        let h = FrameHeader { payload_bit_length: 2500, mode: CodingMode::Cr3 };
        let bits = h.to_bits();
        assert_eq!(bits.len(), 32);
        assert_eq!(FrameHeader::from_bits(&bits).unwrap(), h);
        let mut bad = bits.clone();
        bad.flip(3);
        assert!(matches!(FrameHeader::from_bits(&bad), Err(PhyError::HeaderDecodeFailed(_))));
    }

    #[test]
    fn header_symbol_count() {
        assert_eq!(header_symbols(5), 12);
    }

    #[test]
    fn empty_payload_is_preamble_and_header() {
        let plan = FramePlan::new(0, CodingMode::Cr0, 5);
        let slots = frame_slots(&BitString::new(), &plan, 5);
        assert_eq!(slots.len(), 8 + 12);
        assert!(slots[..6].iter().all(|s| *s == Slot::PreambleUp));
        assert!(slots[6..8].iter().all(|s| *s == Slot::SyncDown));
        assert!(slots[8..].iter().all(|s| matches!(s, Slot::Header(_))));
    }

    #[test]
    fn training_cadence() {
        let bits = BitString::zeros(45);
        let plan = FramePlan::new(45, CodingMode::Cr0, 5);
        assert_eq!(plan.payload_symbol_count, 9);
        assert_eq!(plan.training_symbols(), 3);
        let slots = frame_slots(&bits, &plan, 5);
        let tail: Vec<_> = slots[20..].iter().map(|s| matches!(s, Slot::Training)).collect();
        assert_eq!(
            tail,
            [false, false, false, true, false, false, false, true, false, false, false, true]
        );
        for d in 0..50 {
            let plan = FramePlan::new(d * 5, CodingMode::Cr0, 5);
            let slots = frame_slots(&BitString::zeros(d * 5), &plan, 5);
            let training = slots.iter().filter(|s| **s == Slot::Training).count();
            assert_eq!(training, d / 3);
        }
    }

    #[test]
    fn cr0_duration_formula() {
        // N chars -> N data symbols, N/3 training, 8 preamble, 12 header.
        let p = ModulationParams::default();
        for n in [1usize, 3, 10, 57, 500] {
            let plan = FramePlan::new(5 * n, CodingMode::Cr0, 5);
            let expected = (8 + 12 + n + n / 3) as f64 * 0.016;
            assert!((plan.duration(&p) - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn symbol_packing() {
        let bits = BitString::from_str_bits("00010 11").unwrap();
        assert_eq!(bits_to_symbols(&bits, 5, false), vec![2, 24]);
        assert_eq!(bits_to_symbols(&bits, 5, true), vec![3, 20]);
    }

    #[test]
    fn waveform_length_matches_plan() {
        let chirps = Chirps::new(ModulationParams::default()).unwrap();
        let plan = FramePlan::new(15, CodingMode::Cr0, 5);
        let w = frame(&BitString::zeros(15), &chirps, &plan);
        assert_eq!(w.samples.len(), plan.total_symbols() * 768);
        assert!(w.samples.iter().all(|x| x.abs() <= 1.0));
    }
}
