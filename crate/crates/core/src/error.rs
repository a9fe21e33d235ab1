use thiserror::Error;

/// Errors raised by series arithmetic and the constructions built on it.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by a series that vanishes up to degree {trunc}")]
    ZeroDivisor { trunc: i64 },

    #[error("{op}: expected constant term 1, found {found}")]
    NotUnit { op: &'static str, found: String },

    #[error("{op}: inner series must have zero constant term")]
    NonzeroConstant { op: &'static str },

    #[error("{op}: degenerate linear part")]
    Degenerate { op: &'static str },

    #[error("pole of order {found} exceeds the admissible order {allowed}")]
    PoleOverflow { found: i64, allowed: i64 },

    #[error("{op}: truncation too small (need {needed}, have {have})")]
    TruncationStarved {
        op: &'static str,
        needed: i64,
        have: i64,
    },

    #[error("coefficient at degree {degree} is not real: {value}")]
    NotReal { degree: i64, value: String },

    #[error("invalid gauge map: {0}")]
    InvalidGauge(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("integration failed: {0}")]
    Integration(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
