//! Simulation parameters and their validation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// MAP election and path strategy for a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Trust-gated load x trust election with incumbency and multi-path attachment.
    BlockchainMultipath,
    IndependentRandom,
    SequenceBased,
    DistanceBased,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::BlockchainMultipath,
        Strategy::IndependentRandom,
        Strategy::SequenceBased,
        Strategy::DistanceBased,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::BlockchainMultipath => "blockchain-multipath",
            Strategy::IndependentRandom => "independent-random",
            Strategy::SequenceBased => "sequence-based",
            Strategy::DistanceBased => "distance-based",
        }
    }

    pub fn is_baseline(self) -> bool {
        self != Strategy::BlockchainMultipath
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| ConfigError::UnknownStrategy(s.to_string()))
    }
}

/// Every tunable of a run. Field names double as config-file keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Ring road circumference in meters.
    pub road_length: f64,
    /// Vehicles per meter; the fleet size is Poisson with mean `density * road_length`.
    pub vehicle_density: f64,
    /// km/h
    pub speed_min: f64,
    /// km/h
    pub speed_max: f64,
    /// Selection interval in seconds.
    pub dt: f64,
    pub total_time: f64,
    /// Per-MAP transmit power, watts.
    pub tx_power: f64,
    pub path_loss_exp: f64,
    /// Background noise power, watts.
    pub noise_power: f64,
    /// Orthogonal channels reused along the ring by elected MAPs; 1 puts every
    /// MAP on the same channel.
    pub channels: usize,
    /// Linear SINR threshold.
    pub sinr_threshold: f64,
    /// Mbps
    pub bandwidth_min: f64,
    /// Per-path delay threshold in model seconds.
    pub delay_threshold: f64,
    pub max_paths: usize,
    pub trust_threshold: f64,
    pub map_fraction: f64,
    pub sybil_fraction: f64,
    pub rng_seed: u64,
    pub strategy: Strategy,
    /// Base transmission delay factor, s/m.
    pub delay_a0: f64,
    /// Distance scale of the transmission delay factor, m.
    pub delay_dc: f64,
    /// Base SINR delay factor, s.
    pub delay_b0: f64,
    /// Per-MAP bandwidth scale, Mbps per bit/s/Hz.
    pub bandwidth_cap: f64,
    pub load_max: u32,
    /// Fake identities spawned per attacker.
    pub sybil_clones: usize,
    pub sybil_handover_prob: f64,
    pub sybil_low_sinr_prob: f64,
    pub trust_handover_penalty: f64,
    pub trust_low_sinr_penalty: f64,
    pub trust_stable_reward: f64,
    /// Retain still-eligible MAPs across rounds (blockchain-multipath only).
    pub incumbency: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            road_length: 10_000.0,
            vehicle_density: 0.02,
            speed_min: 50.0,
            speed_max: 80.0,
            dt: 10.0,
            total_time: 1000.0,
            tx_power: 2.0,
            path_loss_exp: 4.0,
            noise_power: 1e-13,
            channels: 3,
            sinr_threshold: 10.0,
            bandwidth_min: 1.0,
            delay_threshold: 15.0,
            max_paths: 2,
            trust_threshold: 50.0,
            map_fraction: 0.10,
            sybil_fraction: 0.10,
            rng_seed: 0,
            strategy: Strategy::BlockchainMultipath,
            delay_a0: 0.05,
            delay_dc: 500.0,
            delay_b0: 10.0,
            bandwidth_cap: 2.0,
            load_max: 4,
            sybil_clones: 3,
            sybil_handover_prob: 0.6,
            sybil_low_sinr_prob: 0.8,
            trust_handover_penalty: 8.0,
            trust_low_sinr_penalty: 5.0,
            trust_stable_reward: 2.0,
            incumbency: true,
        }
    }
}

macro_rules! config_keys {
    ($($field:ident),* $(,)?) => {
        /// Keys accepted by [`SimConfig::set`], in declaration order.
        pub const CONFIG_KEYS: &[&str] = &[$(stringify!($field)),*];

        impl SimConfig {
            /// Assigns one field from its textual form.
            pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
                match key {
                    $(stringify!($field) => {
                        self.$field = parse_value(key, value)?;
                        Ok(())
                    })*
                    _ => Err(ConfigError::UnknownKey(key.to_string())),
                }
            }
        }
    };
}

config_keys!(
    road_length,
    vehicle_density,
    speed_min,
    speed_max,
    dt,
    total_time,
    tx_power,
    path_loss_exp,
    noise_power,
    channels,
    sinr_threshold,
    bandwidth_min,
    delay_threshold,
    max_paths,
    trust_threshold,
    map_fraction,
    sybil_fraction,
    rng_seed,
    strategy,
    delay_a0,
    delay_dc,
    delay_b0,
    bandwidth_cap,
    load_max,
    sybil_clones,
    sybil_handover_prob,
    sybil_low_sinr_prob,
    trust_handover_penalty,
    trust_low_sinr_penalty,
    trust_stable_reward,
    incumbency,
);

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.trim().parse().map_err(|_| ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
    })
}

fn require(ok: bool, key: &'static str, constraint: &'static str) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError::Invalid { key, constraint })
    }
}

impl SimConfig {
    /// Checks every parameter invariant, reporting the first violation.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let finite_pos = |v: f64| v.is_finite() && v > 0.0;
        let prob = |v: f64| (0.0..=1.0).contains(&v);

        require(finite_pos(self.road_length), "road_length", "road_length > 0")?;
        require(
            self.vehicle_density.is_finite() && self.vehicle_density >= 0.0,
            "vehicle_density",
            "vehicle_density >= 0",
        )?;
        require(
            self.speed_min.is_finite() && self.speed_min >= 0.0,
            "speed_min",
            "speed_min >= 0",
        )?;
        require(
            self.speed_max.is_finite() && self.speed_min <= self.speed_max,
            "speed_max",
            "speed_min <= speed_max",
        )?;
        require(finite_pos(self.dt), "dt", "dt > 0")?;
        require(
            self.total_time.is_finite() && self.total_time >= 0.0,
            "total_time",
            "total_time >= 0",
        )?;
        require(finite_pos(self.tx_power), "tx_power", "tx_power > 0")?;
        require(finite_pos(self.path_loss_exp), "path_loss_exp", "path_loss_exp > 0")?;
        require(finite_pos(self.noise_power), "noise_power", "noise_power > 0")?;
        require(self.channels >= 1, "channels", "channels >= 1")?;
        require(finite_pos(self.sinr_threshold), "sinr_threshold", "sinr_threshold > 0")?;
        require(finite_pos(self.bandwidth_min), "bandwidth_min", "bandwidth_min > 0")?;
        require(
            finite_pos(self.delay_threshold),
            "delay_threshold",
            "delay_threshold > 0",
        )?;
        require(self.max_paths >= 1, "max_paths", "max_paths >= 1")?;
        require(
            finite_pos(self.trust_threshold) && self.trust_threshold < 100.0,
            "trust_threshold",
            "0 < trust_threshold < 100",
        )?;
        require(
            self.map_fraction > 0.0 && self.map_fraction < 1.0,
            "map_fraction",
            "0 < map_fraction < 1",
        )?;
        require(
            self.sybil_fraction >= 0.0 && self.sybil_fraction < 1.0,
            "sybil_fraction",
            "0 <= sybil_fraction < 1",
        )?;
        require(finite_pos(self.delay_a0), "delay_a0", "delay_a0 > 0")?;
        require(finite_pos(self.delay_dc), "delay_dc", "delay_dc > 0")?;
        require(finite_pos(self.delay_b0), "delay_b0", "delay_b0 > 0")?;
        require(finite_pos(self.bandwidth_cap), "bandwidth_cap", "bandwidth_cap > 0")?;
        require(self.load_max >= 1, "load_max", "load_max >= 1")?;
        require(
            prob(self.sybil_handover_prob),
            "sybil_handover_prob",
            "0 <= sybil_handover_prob <= 1",
        )?;
        require(
            prob(self.sybil_low_sinr_prob),
            "sybil_low_sinr_prob",
            "0 <= sybil_low_sinr_prob <= 1",
        )?;
        require(
            self.trust_handover_penalty.is_finite() && self.trust_handover_penalty >= 0.0,
            "trust_handover_penalty",
            "trust_handover_penalty >= 0",
        )?;
        require(
            self.trust_low_sinr_penalty.is_finite() && self.trust_low_sinr_penalty >= 0.0,
            "trust_low_sinr_penalty",
            "trust_low_sinr_penalty >= 0",
        )?;
        require(
            self.trust_stable_reward.is_finite() && self.trust_stable_reward >= 0.0,
            "trust_stable_reward",
            "trust_stable_reward >= 0",
        )?;
        Ok(())
    }

    /// Number of selection rounds, `floor(total_time / dt)`.
    pub fn rounds(&self) -> u64 {
        // Guards against 0.3 / 0.1 = 2.9999999999999996.
        ((self.total_time / self.dt) + 1e-9).floor() as u64
    }

    pub fn speed_min_ms(&self) -> f64 {
        kmh_to_ms(self.speed_min)
    }

    pub fn speed_max_ms(&self) -> f64 {
        kmh_to_ms(self.speed_max)
    }

    /// Writes the config as `key=value` lines that [`SimConfig::set`] reads back.
    pub fn to_key_values(&self) -> Vec<(&'static str, String)> {
        let value = serde_json::to_value(self).expect("config serializes");
        CONFIG_KEYS
            .iter()
            .map(|&k| {
                let v = match &value[k] {
                    serde_json::Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                (k, v)
            })
            .collect()
    }
}

pub fn kmh_to_ms(kmh: f64) -> f64 {
    kmh / 3.6
}
