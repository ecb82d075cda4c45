//! The per-interval simulation loop and run-level metrics.
//!
//! One round, in order:
//!
//! 1. advance positions by `dt`;
//! 2. apply last round's trust observations and flag identities at or below
//!    the trust threshold;
//! 3. elect MAPs (trust-gated with incumbency, or trust-blind for baselines);
//! 4. assign paths to every served non-MAP identity;
//! 5. account delay and bandwidth;
//! 6. record trust observations for the next round;
//! 7. emit the selection event for the ledger.
//!
//! RNG draws happen in a fixed order: fleet, Sybil injection, then per round
//! the election draws, the baseline path draws (identity order) and the
//! attacker behaviour draws (identity order).

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{SimConfig, Strategy};
use crate::error::Result;
use crate::ledger::{Hash256, Ledger, SelectionEvent};
use crate::model::{generate_fleet, step_positions, FleetState, Role, VehicleId};
use crate::pathing::{
    baseline_paths, count_handovers, select_paths, AttachmentBook, MapSite, PathAssignment,
    RadioEnvironment,
};
use crate::selection::{elect_maps, map_count, select_maps, selection_probabilities, CandidateTable};
use crate::trust::{
    detection_rate, sybil_observation, update_trust, DetectionRates, RoundObservation, TrustRecord,
};

/// Mutable world state carried between rounds.
#[derive(Debug, Clone)]
pub struct SimState {
    pub config: SimConfig,
    pub fleet: FleetState,
    /// MAPs elected in the previous round.
    pub maps: Vec<VehicleId>,
    /// Previous round's assignment per identity.
    pub assignments: Vec<PathAssignment>,
    /// Observations recorded last round, applied at the start of the next.
    pub pending: Vec<Option<RoundObservation>>,
}

impl SimState {
    pub fn new(config: SimConfig, fleet: FleetState) -> Self {
        let n = fleet.len();
        let assignments = fleet
            .vehicles
            .iter()
            .map(|v| PathAssignment::empty(v.id, 0))
            .collect();
        SimState {
            config,
            fleet,
            maps: Vec::new(),
            assignments,
            pending: vec![None; n],
        }
    }

    pub fn initialize<R: Rng + ?Sized>(config: SimConfig, rng: &mut R) -> Result<Self> {
        let fleet = generate_fleet(&config, rng)?;
        Ok(SimState::new(config, fleet))
    }
}

/// One honest, served, non-MAP vehicle in one round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleRound {
    pub id: VehicleId,
    pub handovers: u32,
    /// Mean total delay over the vehicle's paths; absent when disconnected.
    pub mean_delay: Option<f64>,
    pub paths: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundMetrics {
    pub round: u64,
    pub vehicle_count: usize,
    pub maps: Vec<VehicleId>,
    pub flagged_count: usize,
    /// Flagged non-MAP identities denied service.
    pub excluded_count: usize,
    pub attached_count: usize,
    pub disconnected: usize,
    pub vehicles: Vec<VehicleRound>,
}

/// Per-round figures written to `metrics.csv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundSummary {
    pub avg_handover: Option<f64>,
    pub max_handover: Option<u32>,
    pub min_handover: Option<u32>,
    pub avg_delay: Option<f64>,
}

impl RoundMetrics {
    pub fn elected_count(&self) -> usize {
        self.maps.len()
    }

    pub fn summary(&self) -> RoundSummary {
        let hs: Vec<u32> = self.vehicles.iter().map(|v| v.handovers).collect();
        let delays: Vec<f64> = self.vehicles.iter().filter_map(|v| v.mean_delay).collect();
        RoundSummary {
            avg_handover: mean(hs.iter().map(|&h| f64::from(h))),
            max_handover: hs.iter().copied().max(),
            min_handover: hs.iter().copied().min(),
            avg_delay: mean(delays.iter().copied()),
        }
    }
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

#[derive(Debug, Clone)]
pub struct RoundOutput {
    pub metrics: RoundMetrics,
    pub event: SelectionEvent,
    /// Assignments of every served non-MAP identity, identity order.
    pub assignments: Vec<PathAssignment>,
    /// Trust scores as used by this round's election, identity order.
    pub trust_scores: Vec<f64>,
    pub candidates: CandidateTable,
}

pub fn run_round<R: Rng + ?Sized>(
    state: &mut SimState,
    round: u64,
    rng: &mut R,
) -> Result<RoundOutput> {
    let cfg = state.config.clone();
    let proposed = cfg.strategy == Strategy::BlockchainMultipath;
    let n = state.fleet.len();

    // Update vehicle attributes.
    step_positions(&mut state.fleet, cfg.dt, cfg.road_length);

    // Trust evaluation. Flagged records are frozen.
    for (record, pending) in state.fleet.trust.iter_mut().zip(state.pending.iter_mut()) {
        if let Some(obs) = pending.take() {
            if !record.flagged_sybil {
                *record = update_trust(record, &obs, &cfg, round);
            }
        }
    }
    let flagged: Vec<VehicleId> = state
        .fleet
        .trust
        .iter()
        .filter(|r| r.flagged_sybil)
        .map(|r| r.id)
        .collect();
    let trust_scores: Vec<f64> = state.fleet.trust.iter().map(|r| r.score).collect();

    // Election.
    let (candidates, elected) = if proposed {
        let rows: Vec<(VehicleId, u32, f64)> = state
            .fleet
            .vehicles
            .iter()
            .zip(&state.fleet.trust)
            .filter(|(_, t)| !t.flagged_sybil)
            .map(|(v, t)| (v.id, v.load, t.score))
            .collect();
        let table = selection_probabilities(&rows, cfg.trust_threshold)?;
        let k = map_count(table.len(), cfg.map_fraction);
        let incumbents: &[VehicleId] = if cfg.incumbency { &state.maps } else { &[] };
        let elected = elect_maps(&table, k, incumbents, rng)?;
        (table, elected)
    } else {
        let table = CandidateTable::trust_blind(state.fleet.vehicles.iter().map(|v| (v.id, v.load)));
        let k = map_count(table.len(), cfg.map_fraction);
        let elected = select_maps(&table, k, rng)?;
        (table, elected)
    };

    let mut is_map = vec![false; n];
    for id in &elected {
        is_map[id.index()] = true;
    }
    for v in &mut state.fleet.vehicles {
        v.role = if is_map[v.id.index()] {
            Role::Map
        } else {
            Role::Candidate
        };
    }

    // Path selection.
    let sites: Vec<MapSite> = elected
        .iter()
        .map(|id| MapSite {
            id: *id,
            position: state.fleet.vehicles[id.index()].position,
        })
        .collect();
    let env = RadioEnvironment::new(sites, &cfg);
    let mut book = AttachmentBook::new();
    let mut next: Vec<PathAssignment> = Vec::with_capacity(n);
    let mut served = vec![false; n];
    for v in &state.fleet.vehicles {
        let i = v.id.index();
        let excluded = proposed && state.fleet.trust[i].flagged_sybil;
        if is_map[i] || excluded {
            next.push(PathAssignment::empty(v.id, round));
            continue;
        }
        served[i] = true;
        let a = if proposed {
            select_paths(v, &env, &mut book, &state.assignments[i], round)?
        } else {
            baseline_paths(cfg.strategy, v, &env, &mut book, round, rng)?
        };
        next.push(a);
    }
    book.finalize(next.iter_mut(), &cfg);

    // Accounting and observations.
    let mut vehicles = Vec::new();
    let (mut attached, mut disconnected) = (0usize, 0usize);
    for v in &state.fleet.vehicles {
        let i = v.id.index();
        let a = &next[i];
        let handovers = if round == 0 || !served[i] {
            0
        } else {
            count_handovers(&state.assignments[i], a)
        };
        if served[i] {
            if a.disconnected {
                disconnected += 1;
            } else {
                attached += 1;
            }
            if !v.is_sybil_truth {
                vehicles.push(VehicleRound {
                    id: v.id,
                    handovers,
                    mean_delay: a.mean_delay(),
                    paths: a.paths.len(),
                });
            }
        }
        if state.fleet.trust[i].flagged_sybil {
            continue;
        }
        let actual = if is_map[i] {
            RoundObservation {
                handover_count: 0,
                low_sinr: false,
                connected: true,
            }
        } else {
            RoundObservation {
                handover_count: handovers,
                low_sinr: a.paths.iter().any(|l| l.sinr < cfg.sinr_threshold),
                connected: !a.disconnected,
            }
        };
        state.pending[i] = Some(if v.attacker.is_some() {
            sybil_observation(actual, &cfg, rng)
        } else {
            actual
        });
    }

    for (v, a) in state.fleet.vehicles.iter_mut().zip(&next) {
        v.attached_paths = a.maps().collect();
    }
    let excluded_count = if proposed {
        flagged.iter().filter(|id| !is_map[id.index()]).count()
    } else {
        0
    };

    let event = SelectionEvent {
        round,
        elected_maps: elected.clone(),
        excluded_sybils: if proposed { flagged.clone() } else { Vec::new() },
        input_digest: candidates.digest(),
    };
    let metrics = RoundMetrics {
        round,
        vehicle_count: n,
        maps: elected.clone(),
        flagged_count: flagged.len(),
        excluded_count,
        attached_count: attached,
        disconnected,
        vehicles,
    };
    let assignments = next
        .iter()
        .zip(&served)
        .filter(|(_, s)| **s)
        .map(|(a, _)| a.clone())
        .collect();
    state.assignments = next;
    state.maps = elected;

    Ok(RoundOutput {
        metrics,
        event,
        assignments,
        trust_scores,
        candidates,
    })
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Aggregates {
    /// Honest identities served as non-MAP in at least one round.
    pub vehicles_counted: usize,
    pub avg_handovers: Option<f64>,
    pub max_handovers: Option<u64>,
    pub min_handovers: Option<u64>,
    pub zero_handover_vehicles: usize,
    /// Mean over connected honest vehicle-rounds of the per-vehicle mean path delay.
    pub avg_delay: Option<f64>,
    pub delay_samples: usize,
    pub disconnection_rate: Option<f64>,
    pub detection: DetectionRates,
}

impl Aggregates {
    /// Per-vehicle handover totals over the run.
    pub fn handover_totals(rounds: &[RoundMetrics]) -> BTreeMap<VehicleId, u64> {
        let mut totals = BTreeMap::new();
        for r in rounds {
            for v in &r.vehicles {
                *totals.entry(v.id).or_insert(0) += u64::from(v.handovers);
            }
        }
        totals
    }
}

pub fn compute_metrics(
    rounds: &[RoundMetrics],
    records: &[TrustRecord],
    ground_truth: &[bool],
) -> Aggregates {
    let totals = Aggregates::handover_totals(rounds);
    let delays: Vec<f64> = rounds
        .iter()
        .flat_map(|r| r.vehicles.iter().filter_map(|v| v.mean_delay))
        .collect();
    let vehicle_rounds: usize = rounds.iter().map(|r| r.vehicles.len()).sum();
    let disconnected: usize = rounds
        .iter()
        .map(|r| r.vehicles.iter().filter(|v| v.paths == 0).count())
        .sum();
    Aggregates {
        vehicles_counted: totals.len(),
        avg_handovers: mean(totals.values().map(|&t| t as f64)),
        max_handovers: totals.values().copied().max(),
        min_handovers: totals.values().copied().min(),
        zero_handover_vehicles: totals.values().filter(|&&t| t == 0).count(),
        avg_delay: mean(delays.iter().copied()),
        delay_samples: delays.len(),
        disconnection_rate: (vehicle_rounds > 0)
            .then(|| disconnected as f64 / vehicle_rounds as f64),
        detection: detection_rate(records, ground_truth),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub strategy: Strategy,
    pub seed: u64,
    pub config: SimConfig,
    pub rounds_executed: u64,
    pub aggregates: Aggregates,
    pub ledger_head: Option<Hash256>,
    pub ledger_blocks: usize,
    pub sybil_truth: Vec<bool>,
    pub rounds: Vec<RoundMetrics>,
    /// Trust score of each identity at each round's election.
    pub trust_trajectories: Vec<Vec<f64>>,
    /// Final trust records.
    pub trust: Vec<TrustRecord>,
    /// Not serialized, so identical runs produce identical reports.
    #[serde(skip)]
    pub wall_clock: Duration,
}

impl SimulationReport {
    /// Recomputes the aggregates from the stored per-round data.
    pub fn recompute_aggregates(&self) -> Aggregates {
        compute_metrics(&self.rounds, &self.trust, &self.sybil_truth)
    }
}

#[derive(Debug, Clone)]
pub struct SimulationOutput {
    pub report: SimulationReport,
    pub ledger: Ledger,
}

pub fn run_simulation(config: &SimConfig) -> Result<SimulationOutput> {
    run_simulation_with(config, |_| {})
}

/// Runs a full simulation, handing every round's output to `observe`.
pub fn run_simulation_with<F>(config: &SimConfig, mut observe: F) -> Result<SimulationOutput>
where
    F: FnMut(&RoundOutput),
{
    config.validate()?;
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut state = SimState::initialize(config.clone(), &mut rng)?;
    let mut ledger = Ledger::new();
    let mut rounds = Vec::new();
    let mut trajectories: Vec<Vec<f64>> = vec![Vec::new(); state.fleet.len()];

    for round in 0..config.rounds() {
        let out = run_round(&mut state, round, &mut rng)?;
        ledger.append_event(out.event.clone())?;
        for (traj, score) in trajectories.iter_mut().zip(&out.trust_scores) {
            traj.push(*score);
        }
        observe(&out);
        rounds.push(out.metrics);
    }
    debug_assert!(ledger.verify_chain());

    let truth = state.fleet.sybil_truth();
    let aggregates = compute_metrics(&rounds, &state.fleet.trust, &truth);
    let report = SimulationReport {
        strategy: config.strategy,
        seed: config.rng_seed,
        config: config.clone(),
        rounds_executed: rounds.len() as u64,
        aggregates,
        ledger_head: ledger.head_hash(),
        ledger_blocks: ledger.len(),
        sybil_truth: truth,
        rounds,
        trust_trajectories: trajectories,
        trust: state.fleet.trust.clone(),
        wall_clock: started.elapsed(),
    };
    log::debug!(
        "{} seed {}: {} rounds in {:?}",
        config.strategy,
        config.rng_seed,
        report.rounds_executed,
        report.wall_clock
    );
    Ok(SimulationOutput { report, ledger })
}
