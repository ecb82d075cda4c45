//! Per-vehicle path selection: the ranked, threshold-filtered multi-path rule,
//! the three single-path baselines, and handover counting.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::{SimConfig, Strategy};
use crate::error::{Result, SimError};
use crate::model::{ring_distance, VehicleId, VehicleState};
use crate::radio::{alpha_trans, link_bandwidth, received_power, LinkStats};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapSite {
    pub id: VehicleId,
    pub position: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathAssignment {
    pub vehicle: VehicleId,
    pub round: u64,
    pub paths: Vec<LinkStats>,
    pub disconnected: bool,
}

impl PathAssignment {
    pub fn empty(vehicle: VehicleId, round: u64) -> Self {
        PathAssignment {
            vehicle,
            round,
            paths: Vec::new(),
            disconnected: true,
        }
    }

    fn from_paths(vehicle: VehicleId, round: u64, paths: Vec<LinkStats>) -> Self {
        let disconnected = paths.is_empty();
        PathAssignment {
            vehicle,
            round,
            paths,
            disconnected,
        }
    }

    pub fn maps(&self) -> impl Iterator<Item = VehicleId> + '_ {
        self.paths.iter().map(|l| l.map)
    }

    pub fn mean_delay(&self) -> Option<f64> {
        (!self.paths.is_empty())
            .then(|| self.paths.iter().map(|l| l.total_delay).sum::<f64>() / self.paths.len() as f64)
    }
}

/// A raw candidate link before delay and bandwidth are attached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawLink {
    pub map: VehicleId,
    pub distance: f64,
    pub sinr: f64,
}

/// The elected MAPs of one round, treated as transmitters. MAPs are assigned
/// one of `config.channels` orthogonal channels in order of position along the
/// ring, so adjacent MAPs never share a channel when `channels >= 2`. A link is
/// interfered by every other MAP on its channel.
#[derive(Debug, Clone)]
pub struct RadioEnvironment<'a> {
    maps: Vec<MapSite>,
    channel: Vec<usize>,
    config: &'a SimConfig,
}

impl<'a> RadioEnvironment<'a> {
    pub fn new(mut maps: Vec<MapSite>, config: &'a SimConfig) -> Self {
        maps.sort_by_key(|m| m.id);
        let mut by_position: Vec<usize> = (0..maps.len()).collect();
        by_position.sort_by(|&a, &b| {
            maps[a]
                .position
                .total_cmp(&maps[b].position)
                .then(maps[a].id.cmp(&maps[b].id))
        });
        let mut channel = vec![0; maps.len()];
        for (rank, &i) in by_position.iter().enumerate() {
            channel[i] = rank % config.channels.max(1);
        }
        RadioEnvironment {
            maps,
            channel,
            config,
        }
    }

    /// MAPs sorted by identity.
    pub fn maps(&self) -> &[MapSite] {
        &self.maps
    }

    pub fn channel_of(&self, map: VehicleId) -> Option<usize> {
        self.maps
            .iter()
            .position(|m| m.id == map)
            .map(|i| self.channel[i])
    }

    pub fn config(&self) -> &SimConfig {
        self.config
    }

    /// Links from `position` to every MAP. The interference on MAP j's link is
    /// the power of the co-channel MAPs before j plus those after j, built with
    /// one forward and one backward pass (no subtraction, so a dominant own
    /// signal cannot cancel the interferers out).
    pub fn links_from(&self, position: f64) -> Vec<RawLink> {
        let cfg = self.config;
        let measured: Vec<(f64, f64)> = self
            .maps
            .iter()
            .map(|m| {
                let d = ring_distance(position, m.position, cfg.road_length);
                (d, received_power(cfg.tx_power, d, cfg.path_loss_exp))
            })
            .collect();
        let channels = cfg.channels.max(1);
        let mut interference = vec![0.0; measured.len()];
        let mut running = vec![0.0; channels];
        for (i, (&(_, p), &ch)) in measured.iter().zip(&self.channel).enumerate() {
            interference[i] = running[ch];
            running[ch] += p;
        }
        running.iter_mut().for_each(|r| *r = 0.0);
        for (i, (&(_, p), &ch)) in measured.iter().zip(&self.channel).enumerate().rev() {
            interference[i] += running[ch];
            running[ch] += p;
        }
        self.maps
            .iter()
            .zip(measured)
            .zip(interference)
            .map(|((m, (distance, power)), i)| RawLink {
                map: m.id,
                distance,
                sinr: power / (cfg.noise_power + i),
            })
            .collect()
    }

    pub fn link_to(&self, position: f64, map: VehicleId) -> Option<RawLink> {
        self.links_from(position).into_iter().find(|l| l.map == map)
    }
}

/// Tracks which vehicles share each MAP this round. Bandwidth of a MAP is split
/// evenly among its members.
#[derive(Debug, Clone, Default)]
pub struct AttachmentBook {
    /// Member count and weakest member SINR per MAP.
    members: BTreeMap<VehicleId, (usize, f64)>,
}

impl AttachmentBook {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&self, map: VehicleId) -> usize {
        self.members.get(&map).map_or(0, |m| m.0)
    }

    /// Bandwidth the weakest member (the newcomer included) would get if a
    /// vehicle with `sinr` joined `map`.
    pub fn admission_bandwidth(&self, map: VehicleId, sinr: f64, config: &SimConfig) -> f64 {
        let (count, weakest) = self.members.get(&map).copied().unwrap_or((0, sinr));
        link_bandwidth(weakest.min(sinr), count + 1, config)
    }

    pub fn admit(&mut self, map: VehicleId, sinr: f64) {
        let entry = self.members.entry(map).or_insert((0, sinr));
        entry.0 += 1;
        entry.1 = entry.1.min(sinr);
    }

    /// Rewrites each path's bandwidth with the final member count of its MAP.
    pub fn finalize<'p>(
        &self,
        assignments: impl IntoIterator<Item = &'p mut PathAssignment>,
        config: &SimConfig,
    ) {
        for a in assignments {
            for link in &mut a.paths {
                link.bandwidth = link_bandwidth(link.sinr, self.count(link.map).max(1), config);
            }
        }
    }
}

fn qualifies(link: &LinkStats, admission_bw: f64, config: &SimConfig) -> bool {
    link.total_delay < config.delay_threshold && admission_bw >= config.bandwidth_min
}

fn stats(vehicle: VehicleId, raw: &RawLink, bandwidth: f64, config: &SimConfig) -> Result<LinkStats> {
    LinkStats::evaluate(vehicle, raw.map, raw.distance, raw.sinr, bandwidth, config)
}

/// Multi-path selection: keep still-valid previous paths, then fill the
/// remaining slots from the nearest qualifying MAPs.
pub fn select_paths(
    vehicle: &VehicleState,
    env: &RadioEnvironment<'_>,
    book: &mut AttachmentBook,
    prev: &PathAssignment,
    round: u64,
) -> Result<PathAssignment> {
    let cfg = env.config();
    let mut ranked: Vec<RawLink> = env
        .links_from(vehicle.position)
        .into_iter()
        .filter(|l| l.sinr > 0.0)
        .collect();
    ranked.sort_by(|a, b| a.distance.total_cmp(&b.distance).then(a.map.cmp(&b.map)));

    let mut chosen: Vec<LinkStats> = Vec::with_capacity(cfg.max_paths);
    let mut try_admit = |raw: &RawLink, chosen: &mut Vec<LinkStats>| -> Result<()> {
        if chosen.len() >= cfg.max_paths || chosen.iter().any(|c| c.map == raw.map) {
            return Ok(());
        }
        let bw = book.admission_bandwidth(raw.map, raw.sinr, cfg);
        let link = stats(vehicle.id, raw, bw, cfg)?;
        if qualifies(&link, bw, cfg) {
            book.admit(raw.map, raw.sinr);
            chosen.push(link);
        }
        Ok(())
    };

    for map in prev.maps() {
        if let Some(raw) = ranked.iter().find(|l| l.map == map) {
            try_admit(raw, &mut chosen)?;
        }
    }
    for raw in &ranked {
        // the transmission term alone grows with distance, so no farther
        // candidate can get under the delay threshold either
        if chosen.len() >= cfg.max_paths
            || alpha_trans(raw.distance, cfg) * raw.distance >= cfg.delay_threshold
        {
            break;
        }
        try_admit(raw, &mut chosen)?;
    }
    Ok(PathAssignment::from_paths(vehicle.id, round, chosen))
}

/// Single-path baselines. None of them filter by delay, bandwidth or trust.
pub fn baseline_paths<R: Rng + ?Sized>(
    strategy: Strategy,
    vehicle: &VehicleState,
    env: &RadioEnvironment<'_>,
    book: &mut AttachmentBook,
    round: u64,
    rng: &mut R,
) -> Result<PathAssignment> {
    let maps = env.maps();
    if strategy == Strategy::BlockchainMultipath {
        return Err(SimError::NotABaseline(strategy.to_string()));
    }
    if maps.is_empty() {
        return Ok(PathAssignment::empty(vehicle.id, round));
    }
    let cfg = env.config();
    let links = env.links_from(vehicle.position);
    let pick = match strategy {
        Strategy::IndependentRandom => rng.random_range(0..maps.len()),
        Strategy::SequenceBased => {
            ((u64::from(vehicle.id.0) + round) % maps.len() as u64) as usize
        }
        Strategy::DistanceBased => links
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| a.distance.total_cmp(&b.distance).then(a.map.cmp(&b.map)))
            .map(|(i, _)| i)
            .expect("non-empty"),
        Strategy::BlockchainMultipath => unreachable!(),
    };
    let raw = links[pick];
    if !(raw.sinr > 0.0) {
        return Ok(PathAssignment::empty(vehicle.id, round));
    }
    let bw = book.admission_bandwidth(raw.map, raw.sinr, cfg);
    book.admit(raw.map, raw.sinr);
    let link = stats(vehicle.id, &raw, bw, cfg)?;
    Ok(PathAssignment::from_paths(vehicle.id, round, vec![link]))
}

/// Number of MAPs in `next` that were not in `prev`.
pub fn count_handovers(prev: &PathAssignment, next: &PathAssignment) -> u32 {
    next.maps().filter(|m| !prev.maps().any(|p| p == *m)).count() as u32
}
