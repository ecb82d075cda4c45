//! One hand-traced round over five vehicles with a constant random source.

use std::path::PathBuf;

use mapsel_core::{
    run_round, FleetState, LinkStats, PathAssignment, RoundObservation, SimConfig, SimState,
    TrustRecord, VehicleId, VehicleState,
};
use rand::RngCore;
use sha2::{Digest, Sha256};

/// Every draw is `1 << 63`, so `random::<f64>()` is exactly 0.5.
struct Half;

impl RngCore for Half {
    fn next_u32(&mut self) -> u32 {
        1 << 31
    }
    fn next_u64(&mut self) -> u64 {
        1 << 63
    }
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        dst.fill(0x80);
    }
}

fn link(vehicle: u32, map: u32, distance: f64, sinr: f64, cfg: &SimConfig) -> LinkStats {
    LinkStats::evaluate(VehicleId(vehicle), VehicleId(map), distance, sinr, 1.0, cfg).unwrap()
}

fn scenario() -> SimState {
    let cfg = SimConfig {
        map_fraction: 0.4,
        ..SimConfig::default()
    };
    let specs = [
        (1000.0, 20.0, 2, 100.0),
        (1100.0, 15.0, 3, 90.0),
        (1300.0, 20.0, 1, 40.0),
        (1500.0, 25.0, 4, 70.0),
        (1700.0, 20.0, 2, 100.0),
    ];
    let mut vehicles = Vec::new();
    let mut trust = Vec::new();
    for (i, &(p, s, l, t)) in specs.iter().enumerate() {
        let id = VehicleId(i as u32);
        vehicles.push(VehicleState::new(id, p, s, l));
        trust.push(TrustRecord {
            score: t,
            flagged_sybil: t <= cfg.trust_threshold,
            ..TrustRecord::new(id)
        });
    }
    vehicles[2].is_sybil_truth = true;
    vehicles[2].attacker = Some(VehicleId(4));

    let mut state = SimState::new(cfg.clone(), FleetState { vehicles, trust });
    state.maps = vec![VehicleId(4)];
    for v in [0u32, 3] {
        let a = &mut state.assignments[v as usize];
        a.paths = vec![link(v, 4, 100.0, 1e4, &cfg)];
        a.disconnected = false;
    }
    state.pending[3] = Some(RoundObservation {
        handover_count: 1,
        low_sinr: true,
        connected: true,
    });
    state
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * b.abs().max(1.0)
}

fn expected_delay(d: f64, sinr: f64) -> f64 {
    0.05 * (1.0 + d / 500.0) * d + 10.0 * f64::max(1.0, 10.0 / sinr) / sinr
}

#[test]
fn five_vehicle_round_matches_hand_trace() {
    let mut state = scenario();
    let out = run_round(&mut state, 1, &mut Half).unwrap();

    let positions: Vec<f64> = state.fleet.vehicles.iter().map(|v| v.position).collect();
    assert_eq!(positions, vec![1200.0, 1250.0, 1500.0, 1750.0, 1900.0]);

    // v3: 70 - 8 - 5
    assert_eq!(out.trust_scores, vec![100.0, 90.0, 40.0, 57.0, 100.0]);

    // Eligible weights 200, 270, 228, 200; k = round(0.4 * 4) = 2. The
    // incumbent v4 stays and one draw over {v0: 200, v1: 270, v3: 228} at
    // 0.5 * 698 = 349 lands in v1's band (200, 470].
    assert_eq!(out.event.elected_maps, vec![VehicleId(4), VehicleId(1)]);
    assert_eq!(out.event.excluded_sybils, vec![VehicleId(2)]);
    let ids: Vec<u32> = out.candidates.entries.iter().map(|c| c.id.0).collect();
    assert_eq!(ids, vec![0, 1, 3, 4]);

    let mut h = Sha256::new();
    for (id, load, t) in [(0u32, 2u32, 100.0f64), (1, 3, 90.0), (3, 4, 57.0), (4, 2, 100.0)] {
        h.update(id.to_le_bytes());
        h.update(load.to_le_bytes());
        h.update(t.to_le_bytes());
    }
    assert_eq!(out.event.input_digest.0.as_slice(), h.finalize().as_slice());

    // MAPs v1 at 1250 and v4 at 1900 sit on different channels: no interference.
    let served: Vec<&PathAssignment> = out.assignments.iter().collect();
    assert_eq!(served.len(), 2);
    let v0 = served[0];
    assert_eq!(v0.vehicle, VehicleId(0));
    assert_eq!(v0.paths.len(), 1);
    let l = &v0.paths[0];
    assert_eq!(l.map, VehicleId(1));
    let sinr0 = 2.0 * 50f64.powi(-4) / 1e-13;
    assert!(close(l.distance, 50.0));
    assert!(close(l.sinr, sinr0) && close(sinr0, 3.2e6));
    assert!(close(l.total_delay, 2.750003125));
    assert!(close(l.total_delay, expected_delay(50.0, sinr0)));
    assert!(close(l.bandwidth, 2.0 * (1.0 + sinr0).log2()));

    let v3 = served[1];
    assert_eq!(v3.vehicle, VehicleId(3));
    assert_eq!(v3.paths.len(), 1);
    let l = &v3.paths[0];
    assert_eq!(l.map, VehicleId(4));
    let sinr3 = 2.0 * 150f64.powi(-4) / 1e-13;
    assert!((l.sinr - 39_506.17).abs() < 0.01);
    assert!(close(l.sinr, sinr3));
    assert!(close(l.total_delay, expected_delay(150.0, sinr3)));
    assert!((l.total_delay - 9.750253125).abs() < 1e-9);

    let m = &out.metrics;
    let handovers: Vec<(u32, u32)> = m.vehicles.iter().map(|v| (v.id.0, v.handovers)).collect();
    assert_eq!(handovers, vec![(0, 1), (3, 0)]);
    assert_eq!(
        (m.elected_count(), m.excluded_count, m.attached_count, m.disconnected),
        (2, 1, 2, 0)
    );
    assert_eq!(m.elected_count() + m.excluded_count + m.attached_count + m.disconnected, 5);

    assert_eq!(
        state.pending[0],
        Some(RoundObservation {
            handover_count: 1,
            low_sinr: false,
            connected: true
        })
    );
    assert_eq!(state.pending[2], None);
    assert_eq!(
        state.pending[3],
        Some(RoundObservation {
            handover_count: 0,
            low_sinr: false,
            connected: true
        })
    );

    check_fixture(&out);
}

fn check_fixture(out: &mapsel_core::RoundOutput) {
    let snapshot = serde_json::json!({
        "metrics": out.metrics,
        "event": out.event,
        "event_canonical": out.event.canonical_json(),
        "assignments": out.assignments,
        "trust_scores": out.trust_scores,
    });
    let text = serde_json::to_string_pretty(&snapshot).unwrap() + "\n";
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/golden_round.json");
    if std::env::var_os("MAPSEL_BLESS").is_some() {
        std::fs::write(&path, &text).unwrap();
        return;
    }
    let stored = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("{}: {e}; rerun with MAPSEL_BLESS=1", path.display()));
    assert_eq!(text, stored, "golden round drifted; inspect and rerun with MAPSEL_BLESS=1");
}
