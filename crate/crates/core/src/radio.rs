//! Link model: path-loss received power, SINR, shared bandwidth and the
//! distance/SINR path delay.

use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::error::{Result, SimError};
use crate::model::VehicleId;

/// Received power is evaluated no closer than this, in meters.
pub const REFERENCE_DISTANCE: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkStats {
    pub vehicle: VehicleId,
    pub map: VehicleId,
    pub distance: f64,
    pub sinr: f64,
    /// Mbps
    pub bandwidth: f64,
    pub trans_delay: f64,
    pub total_delay: f64,
    pub alpha_trans: f64,
    pub alpha_sinr: f64,
}

/// The delay of one link split into its terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathDelay {
    pub alpha_trans: f64,
    pub alpha_sinr: f64,
    pub trans_delay: f64,
    pub total_delay: f64,
}

pub fn received_power(tx_power: f64, distance: f64, path_loss_exp: f64) -> f64 {
    let d = distance.max(REFERENCE_DISTANCE);
    // integer exponents (the usual 2..4) avoid the much slower powf
    let loss = if path_loss_exp.fract() == 0.0 && path_loss_exp.abs() <= 16.0 {
        d.powi(path_loss_exp as i32)
    } else {
        d.powf(path_loss_exp)
    };
    tx_power / loss
}

/// SINR of a link whose interferers all transmit at `tx_power`.
pub fn compute_sinr(
    tx_power: f64,
    distance: f64,
    interferer_distances: &[f64],
    config: &SimConfig,
) -> f64 {
    let signal = received_power(tx_power, distance, config.path_loss_exp);
    let interference: f64 = interferer_distances
        .iter()
        .map(|&d| received_power(tx_power, d, config.path_loss_exp))
        .sum();
    signal / (config.noise_power + interference)
}

/// Per-vehicle share of a MAP's capacity when `attached_count` vehicles use it.
pub fn link_bandwidth(sinr: f64, attached_count: usize, config: &SimConfig) -> f64 {
    debug_assert!(attached_count >= 1);
    config.bandwidth_cap / attached_count as f64 * (1.0 + sinr).log2()
}

/// Distance-scaled transmission factor, s/m.
pub fn alpha_trans(distance: f64, config: &SimConfig) -> f64 {
    config.delay_a0 * (1.0 + distance / config.delay_dc)
}

/// SINR factor; grows as the link falls below the SINR threshold.
pub fn alpha_sinr(sinr: f64, config: &SimConfig) -> f64 {
    config.delay_b0 * (config.sinr_threshold / sinr).max(1.0)
}

pub fn path_delay(distance: f64, sinr: f64, config: &SimConfig) -> Result<PathDelay> {
    if !(sinr > 0.0) {
        return Err(SimError::NonPositiveSinr(sinr));
    }
    let a_t = alpha_trans(distance, config);
    let a_s = alpha_sinr(sinr, config);
    let trans_delay = a_t * distance;
    Ok(PathDelay {
        alpha_trans: a_t,
        alpha_sinr: a_s,
        trans_delay,
        total_delay: trans_delay + a_s / sinr,
    })
}

impl LinkStats {
    /// Assembles link statistics; `bandwidth` is supplied by the caller since it
    /// depends on how many vehicles share the MAP.
    pub fn evaluate(
        vehicle: VehicleId,
        map: VehicleId,
        distance: f64,
        sinr: f64,
        bandwidth: f64,
        config: &SimConfig,
    ) -> Result<LinkStats> {
        let delay = path_delay(distance, sinr, config)?;
        Ok(LinkStats {
            vehicle,
            map,
            distance,
            sinr,
            bandwidth,
            trans_delay: delay.trans_delay,
            total_delay: delay.total_delay,
            alpha_trans: delay.alpha_trans,
            alpha_sinr: delay.alpha_sinr,
        })
    }
}
