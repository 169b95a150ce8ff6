//! Verification suites. Each returns one verdict per acceptance criterion,
//! with the measured values alongside.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::compare::window_start;
use super::parallel::map_jobs;
use super::sweep::median_sorted;
use crate::adversary::{AdversaryConfig, JamChannels, Periodic};
use crate::analysis::stats::reset_stats_from;
use crate::analysis::{
    attempts_stats, check_prefix_fullness, check_slot_bounds, check_sync_agreement, check_trial_prefixes,
    interval_metrics, run_metrics, sigma, sigma_oracle,
};
use crate::borrower::{play_finite, play_infinite, GameParams, Strategy};
use crate::engine::{run, RunConfig, Stop, Verbosity};
use crate::protocol::{ProtocolKind, ProtocolParams};
use crate::rng::aux_rng;
use crate::trace::Trace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Bounds,
    Sigma,
    Sync,
    Prefix,
    Borrower,
    Scaling,
    BebContrast,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Bounds,
        Suite::Sigma,
        Suite::Sync,
        Suite::Prefix,
        Suite::Borrower,
        Suite::Scaling,
        Suite::BebContrast,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Bounds => "bounds",
            Suite::Sigma => "sigma",
            Suite::Sync => "sync",
            Suite::Prefix => "prefix",
            Suite::Borrower => "borrower",
            Suite::Scaling => "scaling",
            Suite::BebContrast => "beb-contrast",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
                format!("unknown suite {s:?}; expected one of {}", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    /// Acceptance criterion number; `None` for supplementary checks.
    pub id: Option<u8>,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub data: Value,
}

impl CriterionReport {
    fn new(id: impl Into<Option<u8>>, name: &str, passed: bool, detail: String, data: Value) -> Self {
        CriterionReport {
            id: id.into(),
            name: name.to_string(),
            passed,
            detail,
            data,
        }
    }

    /// One human-readable verdict line.
    pub fn line(&self) -> String {
        let id = self.id.map_or_else(|| "-".to_string(), |i| i.to_string());
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        format!("[{verdict}] criterion {id:>2} {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub criteria: Vec<CriterionReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// First seed; run `i` of a battery uses `seed + i`.
    pub seed: u64,
    pub jobs: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { seed: 1, jobs: 1 }
    }
}

/// Prefix-fullness violations over a set of traces.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefixTally {
    pub traces: u64,
    pub violations: u64,
}

impl PrefixTally {
    fn of(trace: &Trace) -> Self {
        PrefixTally {
            traces: 1,
            violations: check_prefix_fullness(trace).len() as u64,
        }
    }

    fn add(self, other: PrefixTally) -> PrefixTally {
        PrefixTally {
            traces: self.traces + other.traces,
            violations: self.violations + other.violations,
        }
    }
}

pub fn verify(suite: Suite, options: &VerifyOptions) -> SuiteReport {
    let criteria = match suite {
        Suite::Bounds => vec![verify_slot_bounds(options), verify_trial_prefixes(options)],
        Suite::Sigma => vec![verify_sigma(options)],
        Suite::Sync => verify_sync(options),
        Suite::Prefix => {
            let scaling = batch_scaling(options);
            let contrast = beb_contrast(options);
            vec![prefix_criterion(&[scaling.prefix, contrast.prefix])]
        }
        Suite::Borrower => verify_borrower(options),
        Suite::Scaling => batch_scaling(options).criteria,
        Suite::BebContrast => vec![beb_contrast(options).criterion],
    };
    SuiteReport { suite, criteria }
}

pub fn prefix_criterion(tallies: &[PrefixTally]) -> CriterionReport {
    let total = tallies.iter().fold(PrefixTally::default(), |a, &b| a.add(b));
    CriterionReport::new(
        7,
        "prefix fullness",
        total.violations == 0 && total.traces > 0,
        format!("{} violations over {} traces", total.violations, total.traces),
        json!(total),
    )
}

// ---- per-slot bounds and the coin game ----

pub const BOUND_MULTISETS: [&[u64]; 5] = [&[1], &[2], &[1, 1], &[2, 4, 8], &[1, 1, 1, 1, 1, 1, 1, 1]];
pub const BOUND_TRIALS: u64 = 100_000;

pub fn verify_slot_bounds(options: &VerifyOptions) -> CriterionReport {
    let params = ProtocolParams::default();
    let reports: Vec<_> = BOUND_MULTISETS
        .iter()
        .enumerate()
        .map(|(i, ages)| check_slot_bounds(ages, &params, BOUND_TRIALS, options.seed.wrapping_add(i as u64)))
        .collect();
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| format!("{:?}", r.ages))
        .collect();
    let detail = if failed.is_empty() {
        format!("{} multisets x {BOUND_TRIALS} trials within 3 sigma", reports.len())
    } else {
        format!("outside bounds for {}", failed.join(", "))
    };
    CriterionReport::new(5, "per-slot probability bounds", failed.is_empty(), detail, json!(reports))
}

pub const TRIAL_PREFIX_HORIZON: u64 = 1 << 14;
pub const TRIAL_PREFIX_SEQUENCES: u64 = 10_000;

pub fn verify_trial_prefixes(options: &VerifyOptions) -> CriterionReport {
    let p = 1.0 - (-0.5f64).exp();
    let report = check_trial_prefixes(p, TRIAL_PREFIX_HORIZON, TRIAL_PREFIX_SEQUENCES, options.seed);
    let detail = format!(
        "fraction {:.4} (stderr {:.4}) of sequences keep every prefix dense; need >= 0.5 - 3 sigma",
        report.fraction.value, report.fraction.stderr
    );
    CriterionReport::new(12, "trial-prefix game", report.passed, detail, json!(report))
}

// ---- sigma ----

pub const SIGMA_MULTISETS: u64 = 10_000;

/// Random multisets of 1 to 100 ages up to 10^6; every other one is drawn
/// from small ages so that ties and repeated values are common.
pub fn random_age_multisets(count: u64, seed: u64) -> Vec<Vec<u64>> {
    let mut rng = aux_rng(seed, 0x51_6a);
    (0..count)
        .map(|i| {
            let len = rng.gen_range(1..=100);
            let max = if i % 2 == 0 { 1_000_000 } else { 20 };
            (0..len).map(|_| rng.gen_range(1..=max)).collect()
        })
        .collect()
}

pub fn verify_sigma(options: &VerifyOptions) -> CriterionReport {
    let sets = random_age_multisets(SIGMA_MULTISETS, options.seed);
    let mismatches: Vec<&Vec<u64>> = sets.iter().filter(|a| sigma(a) != sigma_oracle(a)).collect();
    CriterionReport::new(
        6,
        "sigma oracle equivalence",
        mismatches.is_empty(),
        format!("{} mismatches over {} multisets", mismatches.len(), sets.len()),
        json!({ "multisets": sets.len(), "mismatches": mismatches.iter().take(5).collect::<Vec<_>>() }),
    )
}

// ---- single-channel synchronization ----

pub const SYNC_RUNS: u64 = 1000;
pub const SYNC_SLOTS: u64 = 3000;

/// Arrivals plus control-channel disruption, randomized from `seed`.
pub fn random_sync_adversary(seed: u64) -> AdversaryConfig {
    let mut rng = aux_rng(seed, 0x5e_c0);
    let mut parts = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        parts.push(if rng.gen_bool(0.5) {
            AdversaryConfig::Batch {
                n: rng.gen_range(1..=24),
                slot: rng.gen_range(0..400),
            }
        } else {
            AdversaryConfig::Poisson {
                rate: rng.gen_range(0.005..0.1),
                limit: Some(rng.gen_range(1..=40)),
            }
        });
    }
    let windows = (0..rng.gen_range(0..=3))
        .map(|_| {
            let start = rng.gen_range(0..SYNC_SLOTS);
            (start, start + rng.gen_range(1..=40))
        })
        .collect();
    let periodic = rng.gen_bool(0.5).then(|| {
        let period = rng.gen_range(4..=40);
        Periodic {
            period,
            length: rng.gen_range(1..=period / 4),
            offset: rng.gen_range(0..period),
            end: None,
        }
    });
    parts.push(AdversaryConfig::WindowJammer {
        windows,
        periodic,
        channels: JamChannels::Control,
    });
    AdversaryConfig::Composite { parts }
}

pub fn sync_config(seed: u64) -> RunConfig {
    RunConfig::new(
        ProtocolKind::ReBackoff1,
        random_sync_adversary(seed),
        seed,
        Stop::MaxSlots { limit: SYNC_SLOTS },
    )
    .with_verbosity(Verbosity::PerPacket)
}

pub fn verify_sync(options: &VerifyOptions) -> Vec<CriterionReport> {
    let seeds: Vec<u64> = (0..SYNC_RUNS).map(|i| options.seed.wrapping_add(i)).collect();
    let results = map_jobs(&seeds, options.jobs, |&seed| {
        let trace = run(sync_config(seed)).expect("generated configs are valid");
        let disagreements = check_sync_agreement(&trace).len() as u64;
        let overlap = trace.records.iter().filter(|r| r.designations.len() >= 2).count() as u64;
        (disagreements, overlap, PrefixTally::of(&trace), trace.successes())
    });
    let disagreements: u64 = results.iter().map(|r| r.0).sum();
    let shared_slots: u64 = results.iter().map(|r| r.1).sum();
    let delivered: u64 = results.iter().map(|r| r.3).sum();
    let prefix = results.iter().fold(PrefixTally::default(), |a, r| a.add(r.2));
    vec![
        CriterionReport::new(
            8,
            "single-channel synchronization",
            disagreements == 0,
            format!(
                "{disagreements} disagreements over {SYNC_RUNS} runs ({shared_slots} slots with 2+ active packets, {delivered} deliveries)"
            ),
            json!({ "runs": SYNC_RUNS, "disagreements": disagreements, "shared_slots": shared_slots }),
        ),
        CriterionReport::new(
            None,
            "single-channel prefix fullness",
            prefix.violations == 0,
            format!("{} violations over {} traces", prefix.violations, prefix.traces),
            json!(prefix),
        ),
    ]
}

// ---- bad borrower ----

pub const BORROWER_PLAYS: u64 = 1000;
pub const BORROWER_TARGET: f64 = 1000.0;
pub const INFINITE_ITERATIONS: u64 = 100_000;

pub fn verify_borrower(options: &VerifyOptions) -> Vec<CriterionReport> {
    let params = GameParams::new(0.5, 0.5).expect("valid");
    let n = BORROWER_TARGET;
    let limit = n / params.rate() + n;
    let strategies = Strategy::battery(n, &params);
    let means: Vec<(String, f64)> = map_jobs(&strategies, options.jobs, |strategy| {
        let total: f64 = (0..BORROWER_PLAYS)
            .map(|i| play_finite(&params, &mut strategy.clone(), n, options.seed.wrapping_add(i)).borrowed_total)
            .sum();
        (strategy.name().to_string(), total / BORROWER_PLAYS as f64)
    });
    let finite_ok = means.iter().all(|(_, m)| *m <= 1.05 * limit);
    let listing: Vec<String> = means.iter().map(|(s, m)| format!("{s} {m:.0}")).collect();

    let seeds: Vec<u64> = (0..BORROWER_PLAYS).map(|i| options.seed.wrapping_add(i)).collect();
    let late: Vec<bool> = map_jobs(&seeds, options.jobs, |&seed| {
        let mut doubling = Strategy::Doubling { cap: f64::INFINITY };
        let points = play_infinite(&params, &mut doubling, INFINITE_ITERATIONS, seed);
        points.last().is_some_and(|r| r > INFINITE_ITERATIONS / 2)
    });
    let late_fraction = late.iter().filter(|&&b| b).count() as f64 / late.len() as f64;

    vec![
        CriterionReport::new(
            10,
            "bad-borrower finite bound",
            finite_ok,
            format!("mean borrowed {} vs limit {:.0} (+5%)", listing.join(", "), limit),
            json!({ "limit": limit, "means": means }),
        ),
        CriterionReport::new(
            None,
            "bad-borrower measurement points recur",
            late_fraction >= 0.99,
            format!(
                "{:.1}% of {} doubling games have a point in the second half of {} iterations",
                100.0 * late_fraction,
                seeds.len(),
                INFINITE_ITERATIONS
            ),
            json!({ "fraction": late_fraction }),
        ),
    ]
}

// ---- batch scaling ----

pub const SCALING_SIZES: [u64; 7] = [64, 128, 256, 512, 1024, 2048, 4096];
pub const SCALING_SEEDS: u64 = 50;
pub const JAMMED_SIZES: [u64; 2] = [256, 1024];
pub const RESET_SIZE: u64 = 1024;
/// Jammed batches see every 10th slot disrupted during the first
/// `JAM_HORIZON_PER_PACKET * n` slots, so disruption stays at `10n`.
pub const JAM_HORIZON_PER_PACKET: u64 = 100;

fn batch_config(n: u64, seed: u64, jammed: bool) -> RunConfig {
    let batch = AdversaryConfig::Batch { n, slot: 0 };
    let adversary = if jammed {
        AdversaryConfig::Composite {
            parts: vec![
                batch,
                AdversaryConfig::WindowJammer {
                    windows: Vec::new(),
                    periodic: Some(Periodic {
                        period: 10,
                        length: 1,
                        offset: 0,
                        end: Some(JAM_HORIZON_PER_PACKET * n),
                    }),
                    channels: JamChannels::Both,
                },
            ],
        }
    } else {
        batch
    };
    RunConfig::new(
        ProtocolKind::ReBackoff2,
        adversary,
        seed,
        Stop::AllDone {
            max_slots: 1000 * n + 10_000,
        },
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchRun {
    pub n: u64,
    pub jammed: bool,
    pub seed: u64,
    pub complete: bool,
    pub makespan: Option<u64>,
    pub mean_attempts: f64,
    pub waste: Option<f64>,
    /// Fraction of counted slots that were disrupted.
    pub disrupted_fraction: Option<f64>,
    pub resets: Vec<u32>,
    pub prefix: PrefixTally,
}

fn batch_run(n: u64, seed: u64, jammed: bool) -> BatchRun {
    let trace = run(batch_config(n, seed, jammed)).expect("valid batch config");
    let metrics = run_metrics(&trace);
    BatchRun {
        n,
        jammed,
        seed,
        complete: trace.complete,
        makespan: metrics.makespan,
        mean_attempts: attempts_stats(&trace).mean,
        waste: metrics.waste,
        disrupted_fraction: (metrics.slots > 0).then(|| metrics.disrupted as f64 / metrics.slots as f64),
        resets: trace.ledger.iter().map(|p| p.resets.len() as u32).collect(),
        prefix: PrefixTally::of(&trace),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingResults {
    pub criteria: Vec<CriterionReport>,
    pub prefix: PrefixTally,
}

struct SizeStats {
    n: u64,
    median_makespan: f64,
    mean_attempts: f64,
    mean_waste: f64,
    incomplete: usize,
}

fn size_stats(runs: &[BatchRun], n: u64, jammed: bool) -> SizeStats {
    let runs: Vec<&BatchRun> = runs.iter().filter(|r| r.n == n && r.jammed == jammed).collect();
    let mut makespans: Vec<f64> = runs.iter().filter_map(|r| r.makespan.map(|m| m as f64)).collect();
    makespans.sort_by(f64::total_cmp);
    let wastes: Vec<f64> = runs.iter().filter_map(|r| r.waste).collect();
    SizeStats {
        n,
        median_makespan: if makespans.is_empty() { f64::NAN } else { median_sorted(&makespans) },
        mean_attempts: runs.iter().map(|r| r.mean_attempts).sum::<f64>() / runs.len() as f64,
        mean_waste: wastes.iter().sum::<f64>() / wastes.len() as f64,
        incomplete: runs.iter().filter(|r| !r.complete).count(),
    }
}

fn spread(values: impl IntoIterator<Item = f64>) -> f64 {
    let (lo, hi) = values
        .into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    hi / lo
}

/// Makespan ratios between consecutive sizes, their allowed range for the
/// size ratio, and the spread of makespan / n.
fn makespan_check(stats: &[SizeStats]) -> (bool, String, Value) {
    let mut ok = stats.iter().all(|s| s.incomplete == 0);
    let mut ratios = Vec::new();
    for w in stats.windows(2) {
        let doublings = (w[1].n as f64 / w[0].n as f64).log2();
        let ratio = w[1].median_makespan / w[0].median_makespan;
        let (lo, hi) = (1.5f64.powf(doublings), 2.7f64.powf(doublings));
        ok &= (lo..=hi).contains(&ratio);
        ratios.push(ratio);
    }
    let per_n = spread(stats.iter().map(|s| s.median_makespan / s.n as f64));
    ok &= per_n <= 2.0;
    let incomplete: usize = stats.iter().map(|s| s.incomplete).sum();
    let detail = format!(
        "median makespan ratios [{}], makespan/n max/min {per_n:.3}, incomplete runs {incomplete}",
        ratios.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>().join(", ")
    );
    let data = json!({
        "n": stats.iter().map(|s| s.n).collect::<Vec<_>>(),
        "median_makespan": stats.iter().map(|s| s.median_makespan).collect::<Vec<_>>(),
        "ratios": ratios,
        "per_n_spread": per_n,
    });
    (ok, detail, data)
}

fn attempts_check(stats: &[SizeStats]) -> (bool, String, Value) {
    let normalized: Vec<f64> = stats
        .iter()
        .map(|s| s.mean_attempts / (s.n as f64).ln().powi(2))
        .collect();
    let s = spread(normalized.iter().copied());
    let detail = format!(
        "mean attempts / ln^2 n = [{}], max/min {s:.3}",
        normalized.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>().join(", ")
    );
    (s <= 2.0, detail, json!({ "normalized": normalized, "spread": s }))
}

pub fn batch_scaling(options: &VerifyOptions) -> ScalingResults {
    let mut jobs = Vec::new();
    for &n in &SCALING_SIZES {
        for i in 0..SCALING_SEEDS {
            jobs.push((n, options.seed.wrapping_add(i), false));
        }
    }
    for &n in &JAMMED_SIZES {
        for i in 0..SCALING_SEEDS {
            jobs.push((n, options.seed.wrapping_add(i), true));
        }
    }
    let runs = map_jobs(&jobs, options.jobs, |&(n, seed, jammed)| {
        let mut r = batch_run(n, seed, jammed);
        if n != RESET_SIZE || jammed {
            r.resets.clear();
        }
        r
    });
    let prefix = runs.iter().fold(PrefixTally::default(), |a, r| a.add(r.prefix));

    let clean: Vec<SizeStats> = SCALING_SIZES.iter().map(|&n| size_stats(&runs, n, false)).collect();
    let jammed: Vec<SizeStats> = JAMMED_SIZES.iter().map(|&n| size_stats(&runs, n, true)).collect();
    let mut criteria = Vec::new();

    let (ok, detail, data) = makespan_check(&clean);
    criteria.push(CriterionReport::new(1, "linear makespan", ok, detail, data));
    let (ok, detail, data) = attempts_check(&clean);
    criteria.push(CriterionReport::new(2, "attempts growth", ok, detail, data));

    let (m_ok, m_detail, m_data) = makespan_check(&jammed);
    let (a_ok, a_detail, a_data) = attempts_check(&jammed);
    let jam_fraction = {
        let f: Vec<f64> = runs.iter().filter(|r| r.jammed).filter_map(|r| r.disrupted_fraction).collect();
        f.iter().sum::<f64>() / f.len() as f64
    };
    criteria.push(CriterionReport::new(
        3,
        "robustness to disruption",
        m_ok && a_ok,
        format!("{:.1}% of slots disrupted; {m_detail}; {a_detail}", 100.0 * jam_fraction),
        json!({ "makespan": m_data, "attempts": a_data, "disrupted_fraction": jam_fraction }),
    ));

    let pooled = runs
        .iter()
        .filter(|r| r.n == RESET_SIZE && !r.jammed)
        .flat_map(|r| r.resets.iter().copied());
    let stats = reset_stats_from(pooled);
    let checked: Vec<_> = stats.tail.iter().filter(|t| t.at_least_k >= 100).collect();
    let decay_ok = checked.iter().all(|t| t.ratio <= 0.9);
    criteria.push(CriterionReport::new(
        9,
        "reset decay",
        decay_ok,
        format!(
            "P(>=k+1)/P(>=k) = [{}] for k with >= 100 samples",
            checked
                .iter()
                .map(|t| format!("k={}: {:.3}", t.k, t.ratio))
                .collect::<Vec<_>>()
                .join(", ")
        ),
        json!(stats),
    ));

    let wastes: Vec<f64> = clean.iter().map(|s| s.mean_waste).collect();
    let first = wastes[0];
    let last = *wastes.last().expect("non-empty sweep");
    let growth_ok = last <= 1.5 * first;
    let below_ok = wastes.iter().all(|&w| w < 0.95);
    criteria.push(CriterionReport::new(
        11,
        "bounded waste",
        growth_ok && below_ok,
        format!(
            "mean waste [{}]; largest/smallest n {:.3} (need <= 1.5); all below 0.95: {below_ok}",
            wastes.iter().map(|w| format!("{w:.4}")).collect::<Vec<_>>().join(", "),
            last / first
        ),
        json!({ "n": SCALING_SIZES, "waste": wastes }),
    ));

    ScalingResults { criteria, prefix }
}

// ---- BEB contrast ----

pub const CONTRAST_SEEDS: u64 = 20;
pub const CONTRAST_HORIZON: u64 = 200_000;

pub fn contrast_adversary() -> AdversaryConfig {
    AdversaryConfig::StreamBurst {
        period: 3,
        burst_size: 512,
        burst_slot: 1000,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContrastResults {
    pub criterion: CriterionReport,
    pub prefix: PrefixTally,
}

pub fn beb_contrast(options: &VerifyOptions) -> ContrastResults {
    let adversary = contrast_adversary();
    let from = window_start(&adversary);
    let mut jobs = Vec::new();
    for i in 0..CONTRAST_SEEDS {
        for kind in [ProtocolKind::ReBackoff2, ProtocolKind::Beb] {
            jobs.push(RunConfig::new(
                kind,
                adversary.clone(),
                options.seed.wrapping_add(i),
                Stop::MaxSlots {
                    limit: CONTRAST_HORIZON,
                },
            ));
        }
    }
    let runs = map_jobs(&jobs, options.jobs, |config| {
        let trace = run(config.clone()).expect("valid contrast config");
        let window = interval_metrics(&trace, from..trace.len()).lambda.unwrap_or(0.0);
        let prefix = if config.protocol == ProtocolKind::Beb {
            PrefixTally::default()
        } else {
            PrefixTally::of(&trace)
        };
        (config.protocol, trace.backlog() as f64, window, prefix)
    });
    let median_of = |kind: ProtocolKind, f: fn(&(ProtocolKind, f64, f64, PrefixTally)) -> f64| {
        let mut v: Vec<f64> = runs.iter().filter(|r| r.0 == kind).map(f).collect();
        v.sort_by(f64::total_cmp);
        median_sorted(&v)
    };
    let rb_backlog = median_of(ProtocolKind::ReBackoff2, |r| r.1);
    let beb_backlog = median_of(ProtocolKind::Beb, |r| r.1);
    let rb_window = median_of(ProtocolKind::ReBackoff2, |r| r.2);
    let beb_window = median_of(ProtocolKind::Beb, |r| r.2);
    let small_backlog = rb_backlog <= 10.0;
    let backlog_gap = beb_backlog >= 10.0 * rb_backlog;
    let throughput_gap = rb_window >= 5.0 * beb_window;
    let prefix = runs.iter().fold(PrefixTally::default(), |a, r| a.add(r.3));
    let criterion = CriterionReport::new(
        4,
        "BEB contrast",
        small_backlog && backlog_gap && throughput_gap,
        format!(
            "median backlog ReBackoff2 {rb_backlog} (<= 10: {small_backlog}), BEB {beb_backlog} (>= 10x: {backlog_gap}); \
             post-burst throughput ReBackoff2 {rb_window:.4}, BEB {beb_window:.4} (>= 5x: {throughput_gap})"
        ),
        json!({
            "rebackoff_backlog": rb_backlog,
            "beb_backlog": beb_backlog,
            "rebackoff_window_lambda": rb_window,
            "beb_window_lambda": beb_window,
        }),
    );
    ContrastResults { criterion, prefix }
}
