//! Road, fleet and mobility.

use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::error::Result;
use crate::trust::{inject_sybils, TrustRecord};

/// Identity of a vehicle or of a fake identity spawned by an attacker.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct VehicleId(pub u32);

impl VehicleId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VehicleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Candidate,
    Map,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleState {
    pub id: VehicleId,
    /// Meters along the ring, in `[0, road_length)`.
    pub position: f64,
    /// m/s
    pub speed: f64,
    pub load: u32,
    /// Ground truth; read only by the attacker behaviour model and by metrics.
    pub is_sybil_truth: bool,
    /// Physical vehicle hosting this identity when it is a fake.
    pub attacker: Option<VehicleId>,
    pub attached_paths: Vec<VehicleId>,
    pub role: Role,
}

impl VehicleState {
    pub fn new(id: VehicleId, position: f64, speed: f64, load: u32) -> Self {
        VehicleState {
            id,
            position,
            speed,
            load,
            is_sybil_truth: false,
            attacker: None,
            attached_paths: Vec::new(),
            role: Role::Candidate,
        }
    }
}

/// All identities on the road plus their trust records, both indexed by id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FleetState {
    pub vehicles: Vec<VehicleState>,
    pub trust: Vec<TrustRecord>,
}

impl FleetState {
    pub fn len(&self) -> usize {
        self.vehicles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vehicles.is_empty()
    }

    pub fn sybil_truth(&self) -> Vec<bool> {
        self.vehicles.iter().map(|v| v.is_sybil_truth).collect()
    }
}

/// Draws a Poisson-sized honest fleet and then injects Sybil identities.
pub fn generate_fleet<R: Rng + ?Sized>(config: &SimConfig, rng: &mut R) -> Result<FleetState> {
    config.validate()?;
    let lambda = config.vehicle_density * config.road_length;
    let count = if lambda > 0.0 {
        let poisson = Poisson::new(lambda).expect("positive finite mean");
        poisson.sample(rng) as usize
    } else {
        0
    };
    let fleet = populate_fleet(count, config, rng);
    inject_sybils(fleet, config, rng)
}

/// Builds `count` honest vehicles with uniform positions, speeds and loads.
pub fn populate_fleet<R: Rng + ?Sized>(count: usize, config: &SimConfig, rng: &mut R) -> FleetState {
    let (vmin, vmax) = (config.speed_min_ms(), config.speed_max_ms());
    let vehicles: Vec<VehicleState> = (0..count)
        .map(|i| {
            let position = rng.random_range(0.0..config.road_length);
            let speed = if vmin < vmax {
                rng.random_range(vmin..=vmax)
            } else {
                vmin
            };
            let load = rng.random_range(1..=config.load_max);
            VehicleState::new(VehicleId(i as u32), position, speed, load)
        })
        .collect();
    let trust = vehicles.iter().map(|v| TrustRecord::new(v.id)).collect();
    FleetState { vehicles, trust }
}

/// Advances every identity by `speed * dt` around the ring.
pub fn step_positions(fleet: &mut FleetState, dt: f64, road_length: f64) {
    for v in &mut fleet.vehicles {
        v.position = wrap(v.position + v.speed * dt, road_length);
    }
}

fn wrap(x: f64, road_length: f64) -> f64 {
    let r = x.rem_euclid(road_length);
    // rem_euclid can round up to exactly road_length for tiny negative inputs.
    if r >= road_length {
        0.0
    } else {
        r
    }
}

/// Shorter arc between two ring positions.
pub fn ring_distance(a: f64, b: f64, road_length: f64) -> f64 {
    let d = (a - b).abs();
    d.min(road_length - d)
}
