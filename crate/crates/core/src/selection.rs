//! MAP election: load-times-trust selection probabilities and weighted
//! sampling without replacement.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::ledger::{input_digest, Hash256};
use crate::model::VehicleId;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub id: VehicleId,
    pub load: u32,
    pub trust: f64,
    /// `load * trust`
    pub weight: f64,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CandidateTable {
    pub entries: Vec<Candidate>,
}

impl CandidateTable {
    fn from_weights(rows: impl IntoIterator<Item = (VehicleId, u32, f64)>) -> CandidateTable {
        let mut entries: Vec<Candidate> = rows
            .into_iter()
            .map(|(id, load, trust)| Candidate {
                id,
                load,
                trust,
                weight: f64::from(load) * trust,
                probability: 0.0,
            })
            .collect();
        let total: f64 = entries.iter().map(|c| c.weight).sum();
        for c in &mut entries {
            c.probability = c.weight / total;
        }
        CandidateTable { entries }
    }

    /// Table for strategies that ignore trust: every identity weighs its load.
    pub fn trust_blind(rows: impl IntoIterator<Item = (VehicleId, u32)>) -> CandidateTable {
        CandidateTable::from_weights(rows.into_iter().map(|(id, load)| (id, load, 1.0)))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, id: VehicleId) -> bool {
        self.entries.iter().any(|c| c.id == id)
    }

    pub fn digest(&self) -> Hash256 {
        input_digest(self.entries.iter().map(|c| (c.id, c.load, c.trust)))
    }
}

/// `p_i = L_i T_i / sum_j L_j T_j` over identities strictly above the trust threshold.
pub fn selection_probabilities(
    eligible: &[(VehicleId, u32, f64)],
    trust_threshold: f64,
) -> Result<CandidateTable> {
    if let Some(&(id, _, trust)) = eligible.iter().find(|e| !(e.2 > trust_threshold)) {
        return Err(SimError::IneligibleCandidate {
            id,
            trust,
            threshold: trust_threshold,
        });
    }
    debug_assert!(eligible.iter().all(|e| e.1 >= 1));
    Ok(CandidateTable::from_weights(eligible.iter().copied()))
}

/// MAP count for a round: `max(1, round(fraction * eligible))`, capped by `eligible`.
pub fn map_count(eligible: usize, map_fraction: f64) -> usize {
    if eligible == 0 {
        return 0;
    }
    ((map_fraction * eligible as f64).round() as usize).clamp(1, eligible)
}

/// `k` successive draws, each proportional to the weights not yet drawn.
pub fn select_maps<R: Rng + ?Sized>(
    table: &CandidateTable,
    k: usize,
    rng: &mut R,
) -> Result<Vec<VehicleId>> {
    let taken = vec![false; table.len()];
    draw_without_replacement(table, taken, k, rng)
}

/// Keeps previous MAPs that are still in the table (up to `k`, in their
/// previous order) and samples the remaining slots.
pub fn elect_maps<R: Rng + ?Sized>(
    table: &CandidateTable,
    k: usize,
    incumbents: &[VehicleId],
    rng: &mut R,
) -> Result<Vec<VehicleId>> {
    if k > table.len() {
        return Err(SimError::TooManyRequested {
            k,
            available: table.len(),
        });
    }
    let mut taken = vec![false; table.len()];
    let mut elected = Vec::with_capacity(k);
    for id in incumbents {
        if elected.len() == k {
            break;
        }
        if let Some(pos) = table.entries.iter().position(|c| c.id == *id) {
            if !taken[pos] {
                taken[pos] = true;
                elected.push(*id);
            }
        }
    }
    let fresh = draw_without_replacement(table, taken, k - elected.len(), rng)?;
    elected.extend(fresh);
    Ok(elected)
}

fn draw_without_replacement<R: Rng + ?Sized>(
    table: &CandidateTable,
    mut taken: Vec<bool>,
    k: usize,
    rng: &mut R,
) -> Result<Vec<VehicleId>> {
    let available = taken.iter().filter(|t| !**t).count();
    if k > available {
        return Err(SimError::TooManyRequested { k, available });
    }
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let total: f64 = table
            .entries
            .iter()
            .zip(&taken)
            .filter(|(_, t)| !**t)
            .map(|(c, _)| c.weight)
            .sum();
        let target = rng.random::<f64>() * total;
        let mut cumulative = 0.0;
        let mut pick = None;
        for (i, c) in table.entries.iter().enumerate() {
            if taken[i] {
                continue;
            }
            cumulative += c.weight;
            // Rounding can leave target >= cumulative at the end; fall back to
            // the last open entry.
            pick = Some(i);
            if cumulative > target {
                break;
            }
        }
        let i = pick.expect("an open entry exists");
        taken[i] = true;
        out.push(table.entries[i].id);
    }
    Ok(out)
}
