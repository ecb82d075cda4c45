//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any criterion fails.
//!
//! `cargo test -p mapsel-cli --test acceptance [-- <number>...]`

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use mapsel_cli::report::{LEDGER_FILE, METRICS_FILE, SUMMARY_FILE};
use mapsel_cli::{run_experiment, ExperimentSpec};
use mapsel_core::model::populate_fleet;
use mapsel_core::selection::{map_count, select_maps, selection_probabilities};
use mapsel_core::{
    run_round, run_simulation_with, Block, CandidateTable, FleetState, LinkStats, Ledger,
    PathAssignment, RoundObservation, SimConfig, SimState, SimulationReport, Strategy,
    TrustRecord, VehicleId, VehicleState,
};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEEDS: std::ops::Range<u64> = 0..10;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// One default-config run plus the checks that need per-round outputs.
struct Run {
    report: SimulationReport,
    ledger: Ledger,
    paths_checked: usize,
    path_violations: Vec<String>,
}

struct Corpus {
    runs: Vec<(Strategy, u64, Run)>,
}

impl Corpus {
    fn build() -> Corpus {
        let mut runs = Vec::new();
        for seed in SEEDS {
            for strategy in Strategy::ALL {
                let cfg = SimConfig {
                    rng_seed: seed,
                    strategy,
                    ..SimConfig::default()
                };
                let (mut checked, mut bad) = (0usize, Vec::new());
                let out = run_simulation_with(&cfg, |round| {
                    if strategy != Strategy::BlockchainMultipath {
                        return;
                    }
                    for a in &round.assignments {
                        if a.paths.len() > cfg.max_paths {
                            bad.push(format!("round {} vehicle {}: {} paths", a.round, a.vehicle, a.paths.len()));
                        }
                        for l in &a.paths {
                            checked += 1;
                            if !(l.total_delay < cfg.delay_threshold && l.bandwidth >= cfg.bandwidth_min) {
                                bad.push(format!(
                                    "round {} vehicle {} via {}: delay {} bandwidth {}",
                                    a.round, a.vehicle, l.map, l.total_delay, l.bandwidth
                                ));
                            }
                        }
                    }
                })
                .expect("default run");
                runs.push((
                    strategy,
                    seed,
                    Run {
                        report: out.report,
                        ledger: out.ledger,
                        paths_checked: checked,
                        path_violations: bad,
                    },
                ));
            }
        }
        Corpus { runs }
    }

    fn of(&self, strategy: Strategy) -> impl Iterator<Item = (u64, &Run)> + '_ {
        self.runs
            .iter()
            .filter(move |(s, _, _)| *s == strategy)
            .map(|(_, seed, r)| (*seed, r))
    }

    fn paired(&self, a: Strategy, b: Strategy) -> Vec<(&Run, &Run)> {
        self.of(a)
            .map(|(seed, ra)| {
                let rb = self.of(b).find(|(s, _)| *s == seed).unwrap().1;
                (ra, rb)
            })
            .collect()
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(" ")
}

fn c1_handover_reduction(c: &Corpus) -> Outcome {
    let reductions: Vec<f64> = c
        .paired(Strategy::BlockchainMultipath, Strategy::IndependentRandom)
        .iter()
        .map(|(p, r)| 1.0 - p.report.aggregates.avg_handovers.unwrap() / r.report.aggregates.avg_handovers.unwrap())
        .collect();
    let med = median(reductions.clone());
    let slowest = SEEDS
        .map(|seed| {
            c.runs
                .iter()
                .filter(|(_, s, _)| *s == seed)
                .map(|(_, _, r)| r.report.wall_clock)
                .sum::<Duration>()
        })
        .max()
        .unwrap();
    outcome(
        med >= 0.70 && slowest < Duration::from_secs(60),
        format!(
            "median avg-handover reduction {med:.3} (need >= 0.70, target 0.80: {}); per-seed reductions [{}]; slowest seed {slowest:.2?} for all strategies",
            if med >= 0.80 { "met" } else { "missed" },
            fmt_list(&reductions)
        ),
    )
}

/// Honest vehicles that were connected at least once and never handed over.
fn zero_handover_connected(r: &SimulationReport) -> usize {
    let mut total = std::collections::BTreeMap::<VehicleId, (u64, bool)>::new();
    for round in &r.rounds {
        for v in &round.vehicles {
            let e = total.entry(v.id).or_insert((0, false));
            e.0 += u64::from(v.handovers);
            e.1 |= v.paths > 0;
        }
    }
    total.values().filter(|(h, connected)| *h == 0 && *connected).count()
}

fn c2_max_handover_reduction(c: &Corpus) -> Outcome {
    let reductions: Vec<f64> = c
        .paired(Strategy::BlockchainMultipath, Strategy::IndependentRandom)
        .iter()
        .map(|(p, r)| {
            1.0 - p.report.aggregates.max_handovers.unwrap() as f64
                / r.report.aggregates.max_handovers.unwrap() as f64
        })
        .collect();
    let med = median(reductions.clone());
    let zeros: Vec<usize> = c
        .of(Strategy::BlockchainMultipath)
        .map(|(_, r)| zero_handover_connected(&r.report))
        .collect();
    outcome(
        med >= 0.60 && zeros.iter().all(|&z| z >= 1),
        format!(
            "median max-handover reduction {med:.3} (need >= 0.60); per-seed [{}]; connected zero-handover vehicles per run {zeros:?} (need >= 1 each)",
            fmt_list(&reductions)
        ),
    )
}

fn mean_delay(c: &Corpus, s: Strategy) -> f64 {
    let v: Vec<f64> = c.of(s).map(|(_, r)| r.report.aggregates.avg_delay.unwrap()).collect();
    mean(&v)
}

fn c3_delay_ordering(c: &Corpus) -> Outcome {
    let p = mean_delay(c, Strategy::BlockchainMultipath);
    let seq = mean_delay(c, Strategy::SequenceBased);
    let rnd = mean_delay(c, Strategy::IndependentRandom);
    let dist = mean_delay(c, Strategy::DistanceBased);
    let within = (p - seq).abs() <= 0.15 * seq;
    let rnd_ok = rnd >= 1.5 * p;
    let dist_ok = dist >= 1.5 * p;
    outcome(
        within && rnd_ok && dist_ok,
        format!(
            "mean delay blockchain-multipath {p:.3} s, sequence-based {seq:.3e} s (within 15%: {}), independent-random {rnd:.3e} s ({:.3e}x, >= 1.5x: {}), distance-based {dist:.3} s ({:.3}x, >= 1.5x: {})",
            yes(within),
            rnd / p,
            yes(rnd_ok),
            dist / p,
            yes(dist_ok)
        ),
    )
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn c4_sybil_detection(c: &Corpus) -> Outcome {
    let (tpr, fpr): (Vec<f64>, Vec<f64>) = c
        .of(Strategy::BlockchainMultipath)
        .map(|(_, r)| {
            let d = &r.report.aggregates.detection;
            (d.true_positive_rate.unwrap(), d.false_positive_rate.unwrap())
        })
        .unzip();
    let (t, f) = (mean(&tpr), mean(&fpr));
    outcome(
        t >= 0.95 && f <= 0.05,
        format!("mean final-round TPR {t:.4} (need >= 0.95), mean FPR {f:.4} (need <= 0.05)"),
    )
}

/// Each mutation sample picks a block, a byte of its canonical encoding
/// followed by its stored hash, and replaces that byte with a different value.
fn c5_tamper_evidence() -> Outcome {
    let cfg = SimConfig {
        vehicle_density: 0.003,
        total_time: 250.0,
        ..SimConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a3b);
    let (mut mutations, mut undetected, mut clean_failures, mut min_blocks) = (0usize, 0usize, 0usize, usize::MAX);
    for run in 0..100u64 {
        let out = run_simulation_with(&SimConfig { rng_seed: 1000 + run, ..cfg.clone() }, |_| {}).unwrap();
        let ledger = out.ledger;
        min_blocks = min_blocks.min(ledger.len());
        if !ledger.verify_chain() || !Ledger::from_json(&ledger.to_json()).unwrap().verify_chain() {
            clean_failures += 1;
        }
        let mut seen = BTreeSet::new();
        while seen.len() < 1000 {
            let b = rng.random_range(0..ledger.len());
            let block = &ledger.blocks[b];
            let mut bytes = block.canonical_bytes();
            bytes.extend_from_slice(&block.hash.0);
            let pos = rng.random_range(0..bytes.len());
            if !seen.insert((b, pos)) {
                continue;
            }
            bytes[pos] ^= rng.random_range(1..=255u8);
            mutations += 1;
            let (body, hash) = bytes.split_at(bytes.len() - 32);
            let decoded = Block::decode(body, mapsel_core::Hash256(hash.try_into().unwrap()));
            let detected = match decoded {
                Err(_) => true,
                Ok(mutated) => {
                    let mut bad = ledger.clone();
                    bad.blocks[b] = mutated;
                    !bad.verify_chain()
                }
            };
            undetected += usize::from(!detected);
        }
    }
    outcome(
        undetected == 0 && clean_failures == 0 && min_blocks >= 20,
        format!(
            "{mutations} single-byte mutations over 100 runs (>= {min_blocks} blocks each): {undetected} undetected; untampered chains failing: {clean_failures}"
        ),
    )
}

fn rows(loads: &[u32], trusts: &[f64]) -> Vec<(VehicleId, u32, f64)> {
    loads
        .iter()
        .zip(trusts)
        .enumerate()
        .map(|(i, (&l, &t))| (VehicleId(i as u32), l, t))
        .collect()
}

fn probs(table: &CandidateTable) -> Vec<f64> {
    table.entries.iter().map(|c| c.probability).collect()
}

fn c6_probabilities() -> Outcome {
    let mut worst_hand = 0.0f64;
    let hand: [(&[u32], &[f64], &[f64]); 3] = [
        (&[2, 1, 1], &[100.0, 100.0, 60.0], &[5.0 / 9.0, 5.0 / 18.0, 1.0 / 6.0]),
        (&[4, 3, 2, 1], &[100.0, 80.0, 60.0, 55.0], &[400.0 / 815.0, 240.0 / 815.0, 120.0 / 815.0, 55.0 / 815.0]),
        (&[1], &[51.0], &[1.0]),
    ];
    for (loads, trusts, expected) in hand {
        let p = probs(&selection_probabilities(&rows(loads, trusts), 50.0).unwrap());
        for (a, b) in p.iter().zip(expected) {
            worst_hand = worst_hand.max((a - b).abs());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut worst_sum, mut worst_scale) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let n = rng.random_range(1..60);
        let loads: Vec<u32> = (0..n).map(|_| rng.random_range(1..=4)).collect();
        let trusts: Vec<f64> = (0..n).map(|_| rng.random_range(50.001..=100.0)).collect();
        let base = probs(&selection_probabilities(&rows(&loads, &trusts), 50.0).unwrap());
        worst_sum = worst_sum.max((base.iter().sum::<f64>() - 1.0).abs());
        let c: f64 = rng.random_range(0.01..100.0);
        let scaled_t: Vec<f64> = trusts.iter().map(|t| t * c).collect();
        let m: u32 = rng.random_range(2..1000);
        let scaled_l: Vec<u32> = loads.iter().map(|l| l * m).collect();
        for other in [
            probs(&selection_probabilities(&rows(&loads, &scaled_t), 0.0).unwrap()),
            probs(&selection_probabilities(&rows(&scaled_l, &trusts), 50.0).unwrap()),
        ] {
            for (a, b) in base.iter().zip(&other) {
                worst_scale = worst_scale.max((a - b).abs());
            }
        }
    }
    outcome(
        worst_hand <= 1e-12 && worst_sum <= 1e-9 && worst_scale <= 1e-12,
        format!(
            "hand tables max error {worst_hand:.1e} (<= 1e-12); |sum p - 1| max {worst_sum:.1e} (<= 1e-9); scale invariance max error {worst_scale:.1e} (<= 1e-12) over 1000 random tables"
        ),
    )
}

fn exact_inclusion(weights: &[f64], k: usize) -> Vec<f64> {
    fn walk(w: &[f64], k: usize, taken: &mut Vec<usize>, p: f64, acc: &mut [f64]) {
        if taken.len() == k {
            taken.iter().for_each(|&i| acc[i] += p);
            return;
        }
        let rest: f64 = (0..w.len()).filter(|i| !taken.contains(i)).map(|i| w[i]).sum();
        for i in 0..w.len() {
            if !taken.contains(&i) {
                taken.push(i);
                walk(w, k, taken, p * w[i] / rest, acc);
                taken.pop();
            }
        }
    }
    let mut acc = vec![0.0; weights.len()];
    walk(weights, k, &mut Vec::new(), 1.0, &mut acc);
    acc
}

fn c7_sampling_oracle() -> Outcome {
    let tables: [(&[u32], &[f64]); 4] = [
        (&[2, 1, 1], &[100.0, 100.0, 60.0]),
        (&[1, 4, 2, 3, 1], &[99.0, 51.0, 75.0, 60.0, 88.0]),
        (&[4, 4, 1, 1], &[100.0, 90.0, 55.0, 100.0]),
        (&[1, 1], &[100.0, 51.0]),
    ];
    let draws = 100_000;
    let (mut checks, mut outside, mut worst) = (0usize, 0usize, 0.0f64);
    for (ti, (loads, trusts)) in tables.iter().enumerate() {
        let table = selection_probabilities(&rows(loads, trusts), 50.0).unwrap();
        let weights: Vec<f64> = table.entries.iter().map(|c| c.weight).collect();
        for k in 1..=table.len() {
            let exact = exact_inclusion(&weights, k);
            let mut counts = vec![0usize; table.len()];
            let mut rng = ChaCha8Rng::seed_from_u64(700 + (ti * 10 + k) as u64);
            for _ in 0..draws {
                for id in select_maps(&table, k, &mut rng).unwrap() {
                    counts[id.index()] += 1;
                }
            }
            for (&cnt, &p) in counts.iter().zip(&exact) {
                checks += 1;
                let sigma = (p * (1.0 - p) / draws as f64).sqrt();
                let dev = (cnt as f64 / draws as f64 - p).abs();
                if sigma > 0.0 {
                    worst = worst.max(dev / sigma);
                }
                if dev > 3.0 * sigma + 1e-12 {
                    outside += 1;
                }
            }
        }
    }
    outcome(
        outside == 0,
        format!("{checks} inclusion frequencies over {draws} draws each; {outside} outside 3 sigma; worst {worst:.2} sigma"),
    )
}

fn c8_path_soundness(c: &Corpus) -> Outcome {
    let (mut paths, mut bad) = (0usize, Vec::new());
    for (_, r) in c.of(Strategy::BlockchainMultipath) {
        paths += r.paths_checked;
        bad.extend(r.path_violations.iter().cloned());
    }
    outcome(
        bad.is_empty() && paths > 0,
        format!(
            "{paths} recorded paths over 10 default runs; {} violations{}",
            bad.len(),
            bad.first().map(|b| format!(" (first: {b})")).unwrap_or_default()
        ),
    )
}

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

fn golden_state() -> SimState {
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
        let link = LinkStats::evaluate(VehicleId(v), VehicleId(4), 100.0, 1e4, 1.0, &cfg).unwrap();
        state.assignments[v as usize] = PathAssignment {
            vehicle: VehicleId(v),
            round: 0,
            paths: vec![link],
            disconnected: false,
        };
    }
    state.pending[3] = Some(RoundObservation {
        handover_count: 1,
        low_sinr: true,
        connected: true,
    });
    state
}

fn c9_golden() -> Outcome {
    let mut state = golden_state();
    let out = run_round(&mut state, 1, &mut Half).unwrap();
    let snapshot = serde_json::json!({
        "metrics": out.metrics,
        "event": out.event,
        "event_canonical": out.event.canonical_json(),
        "assignments": out.assignments,
        "trust_scores": out.trust_scores,
    });
    let text = serde_json::to_string_pretty(&snapshot).unwrap() + "\n";
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/golden_round.json");
    match fs::read_to_string(&path) {
        Ok(stored) => outcome(
            stored == text,
            format!("{} bytes compared against {}", stored.len(), path.display()),
        ),
        Err(e) => outcome(false, format!("cannot read {}: {e}", path.display())),
    }
}

fn c10_determinism() -> Outcome {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        run_experiment(&ExperimentSpec {
            config: SimConfig::default(),
            strategies: Strategy::ALL.to_vec(),
            seeds: vec![42],
            out_dir: d.path().to_path_buf(),
            jobs: 0,
        })
        .unwrap();
    }
    let mut compared = 0;
    let mut differing = Vec::new();
    for s in Strategy::ALL {
        for f in [METRICS_FILE, SUMMARY_FILE, LEDGER_FILE] {
            let rel: PathBuf = [s.name(), "seed-42", f].iter().collect();
            let a = fs::read(dirs[0].path().join(&rel)).unwrap();
            let b = fs::read(dirs[1].path().join(&rel)).unwrap();
            compared += 1;
            if a != b {
                differing.push(rel.display().to_string());
            }
        }
    }
    let head = |d: &Path| {
        Ledger::from_json(&fs::read_to_string(d.join("blockchain-multipath/seed-42").join(LEDGER_FILE)).unwrap())
            .unwrap()
            .head_hash()
    };
    let (h0, h1) = (head(dirs[0].path()), head(dirs[1].path()));
    outcome(
        differing.is_empty() && h0 == h1 && h0.is_some(),
        format!(
            "{compared} files byte-compared across two runs, differing: {differing:?}; ledger head {}",
            h0.map(|h| h.to_hex()).unwrap_or_default()
        ),
    )
}

fn mean_round_time(n: usize, seed: u64) -> f64 {
    let cfg = SimConfig {
        sybil_fraction: 0.0,
        rng_seed: seed,
        ..SimConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fleet = populate_fleet(n, &cfg, &mut rng);
    let mut state = SimState::new(cfg, fleet);
    for r in 0..3 {
        run_round(&mut state, r, &mut rng).unwrap();
    }
    let rounds = 40;
    let start = Instant::now();
    for r in 3..3 + rounds {
        run_round(&mut state, r, &mut rng).unwrap();
    }
    start.elapsed().as_secs_f64() / rounds as f64
}

fn c11_scaling() -> Outcome {
    let sizes = [100usize, 200, 400, 800];
    let fraction = SimConfig::default().map_fraction;
    let mut points = Vec::new();
    for &n in &sizes {
        let k = map_count(n, fraction) as f64;
        let samples: Vec<f64> = (0..7).map(|rep| mean_round_time(n, rep)).collect();
        points.push((n, n as f64 * k * k.ln(), median(samples)));
    }
    // least squares through the origin
    let a = points.iter().map(|(_, x, t)| x * t).sum::<f64>() / points.iter().map(|(_, x, _)| x * x).sum::<f64>();
    let ratios: Vec<f64> = points.iter().map(|(_, x, t)| t / (a * x)).collect();
    let ok = ratios.iter().all(|r| (1.0 / 1.5..=1.5).contains(r));
    let detail = points
        .iter()
        .zip(&ratios)
        .map(|((n, _, t), r)| format!("n={n}: {:.1} us ({r:.2}x fit)", t * 1e6))
        .collect::<Vec<_>>()
        .join(", ");
    let (first, last) = (points[0], points[points.len() - 1]);
    let nk = |n: usize| n as f64 * map_count(n, fraction) as f64;
    outcome(
        ok,
        format!(
            "t = a*n*k*ln k, a = {a:.3e} s; {detail} (each within 1.5x); t({})/t({}) = {:.1}, n*k*ln k grows {:.1}x, n*k grows {:.1}x",
            last.0,
            first.0,
            last.2 / first.2,
            last.1 / first.1,
            nk(last.0) / nk(first.0)
        ),
    )
}

/// Replays each ledger against the trust trajectory recorded at election time.
fn c12_sybil_exclusion(c: &Corpus) -> Outcome {
    let (mut blocks, mut violations, mut mismatched_exclusions) = (0usize, 0usize, 0usize);
    for (strategy, _, r) in &c.runs {
        let th = r.report.config.trust_threshold;
        for block in &r.ledger.blocks {
            blocks += 1;
            let round = block.round as usize;
            let flagged_now: Vec<VehicleId> = r
                .report
                .trust_trajectories
                .iter()
                .enumerate()
                .filter(|(_, traj)| traj[round] <= th)
                .map(|(i, _)| VehicleId(i as u32))
                .collect();
            let p = &block.payload;
            if p.elected_maps.iter().any(|m| p.excluded_sybils.contains(m)) {
                violations += 1;
            }
            if *strategy == Strategy::BlockchainMultipath {
                if p.elected_maps.iter().any(|m| flagged_now.contains(m)) {
                    violations += 1;
                }
                if p.excluded_sybils != flagged_now {
                    mismatched_exclusions += 1;
                }
            }
        }
    }
    outcome(
        violations == 0 && mismatched_exclusions == 0,
        format!(
            "{blocks} ledger blocks replayed over {} runs: {violations} elected flagged identities, {mismatched_exclusions} exclusion lists disagreeing with replayed trust (trust-gated strategy)",
            c.runs.len()
        ),
    )
}

fn main() -> ExitCode {
    let filter: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let wanted = |n: usize| filter.is_empty() || filter.contains(&n);

    let needs_corpus = [1, 2, 3, 4, 8, 12].iter().any(|&n| wanted(n));
    let corpus = needs_corpus.then(|| {
        let t = Instant::now();
        let c = Corpus::build();
        println!("built {} default runs in {:.1?}", c.runs.len(), t.elapsed());
        c
    });
    let corpus = corpus.as_ref();

    type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;
    let criteria: Vec<(usize, &str, Check)> = vec![
        (1, "handover reduction", Box::new(|| c1_handover_reduction(corpus.unwrap()))),
        (2, "max-handover reduction", Box::new(|| c2_max_handover_reduction(corpus.unwrap()))),
        (3, "delay ordering", Box::new(|| c3_delay_ordering(corpus.unwrap()))),
        (4, "sybil detection", Box::new(|| c4_sybil_detection(corpus.unwrap()))),
        (5, "ledger tamper evidence", Box::new(c5_tamper_evidence)),
        (6, "selection probabilities", Box::new(c6_probabilities)),
        (7, "sampling oracle", Box::new(c7_sampling_oracle)),
        (8, "path constraint soundness", Box::new(|| c8_path_soundness(corpus.unwrap()))),
        (9, "golden round trace", Box::new(c9_golden)),
        (10, "determinism", Box::new(c10_determinism)),
        (11, "complexity scaling", Box::new(c11_scaling)),
        (12, "sybil exclusion invariant", Box::new(|| c12_sybil_exclusion(corpus.unwrap()))),
    ];

    let mut failed = Vec::new();
    let mut ran = 0;
    for (n, name, check) in &criteria {
        if !wanted(*n) {
            continue;
        }
        ran += 1;
        let o = check();
        println!(
            "criterion {n:>2} {:<26} {}: {}",
            name,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.pass {
            failed.push(*n);
        }
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
