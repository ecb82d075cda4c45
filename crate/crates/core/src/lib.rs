//! Deterministic discrete-time simulator of trust-gated, multi-path mobile
//! access point (MAP) selection on a ring road.
//!
//! Vehicles are elected as MAPs with probability proportional to load times
//! trust, identities whose trust drops to the threshold are excluded as Sybil,
//! every other vehicle attaches to up to `max_paths` nearby MAPs whose delay and
//! bandwidth pass the thresholds, and each round's election is committed to a
//! SHA-256 hash chain.

pub mod config;
pub mod engine;
pub mod error;
pub mod ledger;
pub mod model;
pub mod pathing;
pub mod radio;
pub mod selection;
pub mod trust;

pub use config::{SimConfig, Strategy, CONFIG_KEYS};
pub use engine::{
    compute_metrics, run_round, run_simulation, run_simulation_with, Aggregates, RoundMetrics,
    RoundOutput, RoundSummary, SimState, SimulationOutput, SimulationReport, VehicleRound,
};
pub use error::{ConfigError, LedgerError, Result, SimError};
pub use ledger::{verify_chain, Block, Hash256, Ledger, SelectionEvent};
pub use model::{FleetState, Role, VehicleId, VehicleState};
pub use pathing::PathAssignment;
pub use radio::LinkStats;
pub use selection::CandidateTable;
pub use trust::{DetectionRates, RoundObservation, TrustRecord};
