use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("window is identically zero")]
    ZeroWindow,
    #[error("invalid shift set: {0}")]
    InvalidShiftSet(String),
    #[error("interval [{lo}, {hi}] lies outside the valid window [{valid_lo}, {valid_hi}] of an explicit point list")]
    OutsideValidWindow {
        lo: f64,
        hi: f64,
        valid_lo: f64,
        valid_hi: f64,
    },
    #[error("need at least {needed} points, found {found}")]
    TooFewPoints { needed: usize, found: usize },
    #[error("truncation too small: {0}")]
    TruncationTooSmall(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("window values must be real and nonnegative ({0})")]
    NotNonnegative(String),
    #[error("integral of the tile is zero")]
    ZeroIntegral,
}

pub type Result<T> = std::result::Result<T, Error>;
