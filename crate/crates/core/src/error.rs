use thiserror::Error;

use crate::{
    channel::ChannelError, context::ContextError, corruption::CorruptionError, fec::FecError,
    phy::PhyError, recovery::RecoveryError, textcodec::CodecError,
};

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Top-level error for operations spanning several layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Fec(#[from] FecError),
    #[error(transparent)]
    Phy(#[from] PhyError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Corruption(#[from] CorruptionError),
    #[error(transparent)]
    Recovery(#[from] RecoveryError),
    #[error(transparent)]
    Context(#[from] ContextError),
    #[error(transparent)]
    Wav(#[from] crate::phy::wav::WavError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Config(String),
}
