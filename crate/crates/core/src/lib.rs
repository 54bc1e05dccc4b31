//! Software acoustic modem for short diver messages.
//!
//! The stack moves normalized text through a 5-bit character codec, optional
//! Hamming(7,4) channel coding with interleaving, and a chirp spread spectrum
//! physical layer. A parametric underwater channel, a bit-flip corruption
//! corpus generator and a pluggable recovery/similarity evaluator sit around
//! it for reproducing distance, coding and recovery experiments.
//!
//! ```
//! use aquamodem::{fec::CodingMode, Modem};
//!
//! let modem = Modem::default();
//! let tx = modem.transmit_text("ascend now", CodingMode::Cr3).unwrap();
//! let rx = modem.receive_text(&tx.waveform).unwrap();
//! assert_eq!(rx.text, "ascend now");
//! ```

pub mod bits;
pub mod channel;
pub mod context;
pub mod corpus;
pub mod corruption;
pub mod error;
pub mod experiment;
pub mod fec;
mod modem;
pub mod par;
pub mod phy;
pub mod recovery;
pub mod seed;
pub mod textcodec;

pub use bits::BitString;
pub use error::{Error, Result};
pub use modem::{Modem, ReceivedText, Transmission};
