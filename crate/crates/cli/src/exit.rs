//! Process exit codes and the error type that maps onto them.

use std::fmt;

use aquamodem::{phy::PhyError, recovery::RecoveryError, Error};

pub const USAGE: u8 = 1;
pub const DECODE: u8 = 2;
pub const IO: u8 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Decode(String),
    Io(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => USAGE,
            CliError::Decode(_) => DECODE,
            CliError::Io(_) => IO,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Decode(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Phy(PhyError::NoPacketFound | PhyError::SyncFailed(_) | PhyError::HeaderDecodeFailed(_)) => {
                CliError::Decode(msg)
            }
            Error::Io(_) | Error::Csv(_) | Error::Json(_) | Error::Wav(_) => CliError::Io(msg),
            Error::Recovery(RecoveryError::Io(_) | RecoveryError::Process(_) | RecoveryError::Protocol(_)) => {
                CliError::Io(msg)
            }
            _ => CliError::Usage(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

macro_rules! via_core {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                Error::from(e).into()
            }
        }
    )*};
}

via_core!(
    aquamodem::phy::PhyError,
    aquamodem::phy::wav::WavError,
    aquamodem::textcodec::CodecError,
    aquamodem::corruption::CorruptionError,
    aquamodem::recovery::RecoveryError,
    aquamodem::context::ContextError,
    aquamodem::channel::ChannelError,
    serde_json::Error
);
