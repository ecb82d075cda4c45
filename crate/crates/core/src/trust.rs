//! Trust scores, Sybil injection and detection quality.
//!
//! Every identity starts at [`INITIAL_TRUST`]. Each round it is observed
//! (handovers, weak links, connectivity) and its score moves by a fixed
//! penalty/reward table. An identity whose score reaches the threshold is
//! flagged and its record is frozen for the rest of the run.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::error::{ConfigError, Result};
use crate::model::{FleetState, VehicleId, VehicleState};

pub const INITIAL_TRUST: f64 = 100.0;
pub const MAX_TRUST: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrustRecord {
    pub id: VehicleId,
    /// In `[0, 100]`.
    pub score: f64,
    pub flagged_sybil: bool,
    pub last_update_round: u64,
}

impl TrustRecord {
    pub fn new(id: VehicleId) -> Self {
        TrustRecord {
            id,
            score: INITIAL_TRUST,
            flagged_sybil: false,
            last_update_round: 0,
        }
    }
}

/// What the network saw of one identity during a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RoundObservation {
    pub handover_count: u32,
    /// Some attached link had SINR below the threshold.
    pub low_sinr: bool,
    pub connected: bool,
}

pub fn update_trust(
    record: &TrustRecord,
    obs: &RoundObservation,
    config: &SimConfig,
    round: u64,
) -> TrustRecord {
    let mut delta = -config.trust_handover_penalty * f64::from(obs.handover_count);
    if obs.low_sinr {
        delta -= config.trust_low_sinr_penalty;
    }
    if obs.handover_count == 0 && !obs.low_sinr && obs.connected {
        delta += config.trust_stable_reward;
    }
    let score = (record.score + delta).clamp(0.0, MAX_TRUST);
    TrustRecord {
        id: record.id,
        score,
        flagged_sybil: classify_sybil(score, config.trust_threshold),
        last_update_round: round,
    }
}

/// An identity at or below the threshold is treated as Sybil.
pub fn classify_sybil(score: f64, trust_threshold: f64) -> bool {
    score <= trust_threshold
}

/// Picks `floor(sybil_fraction * N)` attackers among the honest vehicles and
/// appends `sybil_clones` fake identities for each, co-located with their host.
pub fn inject_sybils<R: Rng + ?Sized>(
    mut fleet: FleetState,
    config: &SimConfig,
    rng: &mut R,
) -> Result<FleetState> {
    if !(config.sybil_fraction >= 0.0 && config.sybil_fraction < 1.0) {
        return Err(ConfigError::Invalid {
            key: "sybil_fraction",
            constraint: "0 <= sybil_fraction < 1",
        }
        .into());
    }
    let honest = fleet.vehicles.len();
    let attackers = (config.sybil_fraction * honest as f64 + 1e-9).floor() as usize;
    if attackers == 0 || config.sybil_clones == 0 {
        return Ok(fleet);
    }
    let mut chosen = sample(rng, honest, attackers).into_vec();
    chosen.sort_unstable();

    for host in chosen {
        let host = fleet.vehicles[host].clone();
        for _ in 0..config.sybil_clones {
            let id = VehicleId(fleet.vehicles.len() as u32);
            fleet.vehicles.push(VehicleState {
                id,
                position: host.position,
                speed: host.speed,
                load: config.load_max,
                is_sybil_truth: true,
                attacker: Some(host.id),
                attached_paths: Vec::new(),
                role: host.role,
            });
            fleet.trust.push(TrustRecord::new(id));
        }
    }
    Ok(fleet)
}

/// Overlays a fake identity's unstable behaviour on what was actually observed.
/// Always consumes exactly two draws.
pub fn sybil_observation<R: Rng + ?Sized>(
    actual: RoundObservation,
    config: &SimConfig,
    rng: &mut R,
) -> RoundObservation {
    let spurious_handover = rng.random_bool(config.sybil_handover_prob);
    let spurious_low_sinr = rng.random_bool(config.sybil_low_sinr_prob);
    RoundObservation {
        handover_count: actual.handover_count + u32::from(spurious_handover),
        low_sinr: actual.low_sinr || spurious_low_sinr,
        connected: actual.connected,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DetectionRates {
    /// Absent when there are no Sybil identities.
    pub true_positive_rate: Option<f64>,
    /// Absent when there are no honest identities.
    pub false_positive_rate: Option<f64>,
}

pub fn detection_rate(records: &[TrustRecord], ground_truth: &[bool]) -> DetectionRates {
    assert_eq!(records.len(), ground_truth.len());
    let (mut sybil, mut tp, mut honest, mut fp) = (0usize, 0usize, 0usize, 0usize);
    for (r, &is_sybil) in records.iter().zip(ground_truth) {
        if is_sybil {
            sybil += 1;
            tp += usize::from(r.flagged_sybil);
        } else {
            honest += 1;
            fp += usize::from(r.flagged_sybil);
        }
    }
    let ratio = |num: usize, den: usize| (den > 0).then(|| num as f64 / den as f64);
    DetectionRates {
        true_positive_rate: ratio(tp, sybil),
        false_positive_rate: ratio(fp, honest),
    }
}
