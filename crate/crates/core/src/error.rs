use thiserror::Error;

pub type Result<T> = std::result::Result<T, WiretapError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WiretapError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is rank deficient: smallest singular value {smallest:e} <= {tolerance:e}")]
    RankDeficient { smallest: f64, tolerance: f64 },

    #[error("eavesdropper state is not canonical: max |Ht Ht^H - I| = {deviation:e}")]
    NotCanonical { deviation: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(WiretapError::InvalidParameter(msg.into()))
}

pub(crate) fn dim<T>(msg: impl Into<String>) -> Result<T> {
    Err(WiretapError::Dimension(msg.into()))
}
