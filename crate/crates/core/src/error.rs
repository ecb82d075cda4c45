use thiserror::Error;

use crate::model::VehicleId;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`")]
    BadValue { key: String, value: String },
    #[error("invalid `{key}`: requires {constraint}")]
    Invalid {
        key: &'static str,
        constraint: &'static str,
    },
    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),
}

#[derive(Debug, Error, PartialEq)]
pub enum LedgerError {
    #[error("round {got} does not follow round {last}")]
    NonMonotonicRound { last: u64, got: u64 },
    #[error("malformed block encoding: {0}")]
    Malformed(String),
}

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
    #[error("identity {id} with trust {trust} is not above threshold {threshold}")]
    IneligibleCandidate {
        id: VehicleId,
        trust: f64,
        threshold: f64,
    },
    #[error("cannot select {k} of {available} candidates")]
    TooManyRequested { k: usize, available: usize },
    #[error("path delay requires positive SINR, got {0}")]
    NonPositiveSinr(f64),
    #[error("strategy `{0}` is not a baseline")]
    NotABaseline(String),
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
