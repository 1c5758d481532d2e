use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// A file could not be parsed (PPM, FASTA, manifest, report).
    #[error("format error: {0}")]
    Format(String),

    /// A precondition on arguments was violated.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A capacity or search budget was exhausted (codebook shortfall,
    /// primer search, address space overflow).
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// A symbol outside the code table was submitted for encoding.
    #[error("unknown symbol: {0}")]
    UnknownSymbol(i64),

    /// A 3-nt color word is equidistant from two or more codewords.
    #[error("ambiguous color word {0:?}")]
    AmbiguousColor(String),

    /// Inpainting was asked to fill a channel with no known pixels.
    #[error("channel is fully masked, nothing to diffuse from")]
    FullyMasked,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
}
