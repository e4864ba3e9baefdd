use std::time::{Duration, Instant};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spec::{LimitPolicy, SweepParameter, SweepSpec};
use crate::cost::{check_feasibility, total_cost, Normalizers};
use crate::error::{Error, Result};
use crate::heuristics::{dco, gco, nfco, Algorithm};
use crate::ilp::{build_model, solve_exact, SolveLimits, SolveStatus, TieBreak};
use crate::model::{generate_scenario, Decision, GenerationConfig, Scenario};

/// Environment variable holding the sweep worker count.
pub const WORKERS_ENV: &str = "SATCHAIN_WORKERS";

/// Seed of replicate `replicate` at grid point `point`: word `replicate` of
/// ChaCha8 stream `point` keyed by the master seed.
pub fn scenario_seed(master: u64, point: usize, replicate: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(point as u64);
    rng.set_word_pos(2 * replicate as u128);
    rng.next_u64()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    /// Exact solve stopped at its limit; the incumbent was kept.
    Budgeted,
    /// Exact solve stopped at its limit and was discarded.
    LimitFailure,
    /// The decision failed the feasibility check.
    Infeasible,
    /// The exact solver does not run at this point.
    Skipped,
}

/// One algorithm on one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub value: f64,
    pub replicate: usize,
    pub seed: u64,
    pub algorithm: Algorithm,
    pub status: RunStatus,
    /// `Δ / |U|`; present unless the run failed or was skipped.
    pub cost: Option<f64>,
    #[serde(skip)]
    pub time: Duration,
}

/// Aggregates for one (grid value, algorithm) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub value: f64,
    pub algorithm: Algorithm,
    /// Scenarios in the mean.
    pub count: usize,
    /// Runs left out of the mean (limit failures, infeasible decisions).
    pub failures: usize,
    /// Runs in the mean whose exact solve stopped at its limit.
    pub budgeted: usize,
    pub skipped: usize,
    pub mean: Option<f64>,
    /// Sample standard deviation (zero for a single scenario).
    pub std: Option<f64>,
    /// Mean over every run that was attempted.
    pub mean_time_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub version: String,
    pub workers: usize,
    pub spec: SweepSpec,
    /// Human-readable remarks, e.g. grid points that ran without the exact
    /// solver or with budgeted exact solves.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub parameter: SweepParameter,
    pub rows: Vec<ResultRow>,
    pub metadata: SweepMetadata,
    #[serde(skip)]
    pub samples: Vec<Sample>,
}

impl ResultTable {
    pub fn row(&self, value: f64, algorithm: Algorithm) -> Option<&ResultRow> {
        self.rows.iter().find(|r| r.value == value && r.algorithm == algorithm)
    }

    /// Means of `algorithm` in grid order.
    pub fn means(&self, algorithm: Algorithm) -> Vec<Option<f64>> {
        self.rows.iter().filter(|r| r.algorithm == algorithm).map(|r| r.mean).collect()
    }

    /// Violations of the table invariants: DCO means of exactly one and
    /// exact means no larger than the others wherever both cover every
    /// scenario.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for r in &self.rows {
            if r.algorithm == Algorithm::Dco {
                if let Some(m) = r.mean {
                    if (m - 1.0).abs() > 1e-12 {
                        out.push(format!("DCO mean {m} at {} differs from 1", r.value));
                    }
                }
            }
        }
        let complete = |r: &ResultRow| r.failures == 0 && r.skipped == 0 && r.count > 0;
        for ilp in self.rows.iter().filter(|r| r.algorithm == Algorithm::Ilp && complete(r)) {
            for other in self.rows.iter().filter(|r| r.value == ilp.value && r.algorithm != Algorithm::Ilp && complete(r)) {
                let (a, b) = (ilp.mean.unwrap(), other.mean.unwrap());
                if a > b + 1e-9 {
                    out.push(format!("ILP mean {a} above {} mean {b} at {}", other.algorithm, ilp.value));
                }
            }
        }
        out
    }
}

/// Worker count from [`WORKERS_ENV`], defaulting to the available
/// parallelism.
pub fn workers_from_env() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &usize| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs the sweep with the worker count from the environment.
pub fn run_sweep(spec: &SweepSpec) -> Result<ResultTable> {
    run_sweep_with(spec, workers_from_env())
}

/// Runs the sweep on `workers` threads. Costs, counts and failures do not
/// depend on the worker count; times do.
pub fn run_sweep_with(spec: &SweepSpec, workers: usize) -> Result<ResultTable> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidSweep(format!("thread pool: {e}")))?;

    let mut rows = Vec::new();
    let mut samples = Vec::new();
    let mut notes = Vec::new();
    for (point, &value) in spec.values.iter().enumerate() {
        let cfg = spec.parameter.apply(&spec.base, value)?;
        let exact = spec.exact_runs_at(&cfg);
        if spec.algorithms.contains(&Algorithm::Ilp) && !exact {
            notes.push(format!(
                "{} = {value}: exact solver not run ({} terminals above max_terminals)",
                spec.parameter, cfg.n_terminals
            ));
        }
        let per_scenario: Vec<Vec<Sample>> = pool.install(|| {
            (0..spec.scenarios)
                .into_par_iter()
                .map(|rep| run_scenario(spec, &cfg, value, rep, scenario_seed(spec.master_seed, point, rep), exact))
                .collect::<Result<Vec<_>>>()
        })?;
        for (a, &algorithm) in spec.algorithms.iter().enumerate() {
            let runs: Vec<&Sample> = per_scenario.iter().map(|s| &s[a]).collect();
            let row = aggregate(value, algorithm, &runs);
            if row.budgeted > 0 {
                notes.push(format!(
                    "{} = {value}: {} of {} exact solves stopped at the node limit; their best decisions are counted",
                    spec.parameter, row.budgeted, spec.scenarios
                ));
            }
            if algorithm == Algorithm::Ilp && row.failures > 0 {
                notes.push(format!(
                    "{} = {value}: {} exact runs failed and are excluded from the mean",
                    spec.parameter, row.failures
                ));
            }
            rows.push(row);
        }
        samples.extend(per_scenario.into_iter().flatten());
    }

    Ok(ResultTable {
        parameter: spec.parameter,
        rows,
        metadata: SweepMetadata { version: env!("CARGO_PKG_VERSION").to_string(), workers, spec: spec.clone(), notes },
        samples,
    })
}

fn aggregate(value: f64, algorithm: Algorithm, runs: &[&Sample]) -> ResultRow {
    let costs: Vec<f64> = runs.iter().filter_map(|r| r.cost).collect();
    let count_of = |st: RunStatus| runs.iter().filter(|r| r.status == st).count();
    let timed: Vec<f64> = runs.iter().filter(|r| r.status != RunStatus::Skipped).map(|r| r.time.as_secs_f64() * 1e3).collect();
    let (mean, std) = mean_std(&costs);
    ResultRow {
        value,
        algorithm,
        count: costs.len(),
        failures: count_of(RunStatus::LimitFailure) + count_of(RunStatus::Infeasible),
        budgeted: count_of(RunStatus::Budgeted),
        skipped: count_of(RunStatus::Skipped),
        mean,
        std,
        mean_time_ms: mean_std(&timed).0,
    }
}

/// Mean and sample standard deviation, summed in slice order.
fn mean_std(xs: &[f64]) -> (Option<f64>, Option<f64>) {
    if xs.is_empty() {
        return (None, None);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().fold(0.0, |a, &x| a + x) / n;
    let var = if xs.len() > 1 { xs.iter().fold(0.0, |a, &x| a + (x - mean) * (x - mean)) / (n - 1.0) } else { 0.0 };
    (Some(mean), Some(var.sqrt()))
}

/// Solve settings the sweep hands to the exact solver.
pub(super) fn exact_limits(spec: &SweepSpec) -> SolveLimits {
    SolveLimits {
        node_limit: spec.exact.node_limit,
        time_limit: spec.exact.time_limit_ms.map(Duration::from_millis),
        tie_break: TieBreak::FirstFound,
        warm_start: true,
    }
}

/// Runs one algorithm; the flag is true when an exact solve hit its limit.
pub(super) fn run_algorithm(sc: &Scenario, algorithm: Algorithm, limits: &SolveLimits) -> Result<(Decision, bool)> {
    Ok(match algorithm {
        Algorithm::Gco => (gco(sc), false),
        Algorithm::Nfco => (nfco(sc), false),
        Algorithm::Dco => (dco(sc), false),
        Algorithm::Ilp => {
            let model = build_model(sc)?;
            let r = solve_exact(sc, &model, limits)?;
            (r.decision, r.status == SolveStatus::NodeLimit)
        }
    })
}

fn run_scenario(
    spec: &SweepSpec,
    cfg: &GenerationConfig,
    value: f64,
    replicate: usize,
    seed: u64,
    exact: bool,
) -> Result<Vec<Sample>> {
    let sc = generate_scenario(cfg, seed)?;
    let norms = Normalizers::dco(&sc)?;
    let limits = exact_limits(spec);
    let n_u = sc.n_terminals() as f64;
    spec.algorithms
        .iter()
        .map(|&algorithm| {
            let mut sample = Sample { value, replicate, seed, algorithm, status: RunStatus::Skipped, cost: None, time: Duration::ZERO };
            if algorithm == Algorithm::Ilp && !exact {
                return Ok(sample);
            }
            let mut times = Vec::with_capacity(spec.timing_repeats);
            let mut outcome = None;
            for _ in 0..spec.timing_repeats {
                let start = Instant::now();
                let out = run_algorithm(&sc, algorithm, &limits)?;
                times.push(start.elapsed());
                outcome = Some(out);
            }
            times.sort();
            sample.time = times[times.len() / 2];
            let (decision, limited) = outcome.expect("at least one timed run");
            sample.status = if !check_feasibility(&sc, &decision)?.is_feasible() {
                RunStatus::Infeasible
            } else if limited && spec.exact.on_limit == LimitPolicy::Fail {
                RunStatus::LimitFailure
            } else if limited {
                RunStatus::Budgeted
            } else {
                RunStatus::Ok
            };
            if matches!(sample.status, RunStatus::Ok | RunStatus::Budgeted) {
                sample.cost = Some(total_cost(&sc, &decision, &norms)? / n_u);
            }
            Ok(sample)
        })
        .collect()
}
