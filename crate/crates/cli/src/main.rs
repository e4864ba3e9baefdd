use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::Serialize;

use satchain_core::cost::{check_feasibility, evaluate, CostBreakdown, FeasibilityReport, Normalizers};
use satchain_core::experiment::{compare_single, emit_results, run_sweep_with, Contender, SweepSpec, WORKERS_ENV};
use satchain_core::heuristics::{dco, gco, nfco, Algorithm};
use satchain_core::ilp::export_lp;
use satchain_core::{build_model, generate_scenario, solve_exact, Decision, GenerationConfig, Scenario, SolveLimits, SolveStatus};

#[derive(Parser)]
#[command(name = "satchain", version, about = "Service-chain caching and offloading for LEO edge computing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct ExactArgs {
    /// Branch-and-bound node limit for the exact solver.
    #[arg(long, default_value_t = 50_000_000)]
    node_limit: u64,
    /// Wall-clock limit for the exact solver, in milliseconds.
    #[arg(long)]
    time_limit_ms: Option<u64>,
}

impl ExactArgs {
    fn limits(&self) -> SolveLimits {
        SolveLimits {
            node_limit: self.node_limit,
            time_limit: self.time_limit_ms.map(Duration::from_millis),
            ..Default::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random scenario.
    Generate {
        /// Generation config (JSON); missing fields take their defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve one scenario with one algorithm.
    Solve {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        algo: Algorithm,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        exact: ExactArgs,
    },
    /// Write the integer program of a scenario in LP format.
    ExportLp {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a parameter sweep and write result tables.
    Sweep {
        /// Sweep spec (JSON).
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        /// Worker threads; defaults to the available cores.
        #[arg(long, env = WORKERS_ENV)]
        workers: Option<usize>,
    },
    /// Run several algorithms on one scenario and print a side-by-side report.
    Compare {
        #[arg(long)]
        scenario: PathBuf,
        /// Comma-separated algorithms, e.g. `ilp,gco,dco`.
        #[arg(long, value_delimiter = ',', default_value = "ilp,gco,nfco,dco")]
        algos: Vec<Algorithm>,
        /// Extra decision to include, as `label=path.json`. Repeatable.
        #[arg(long = "decision")]
        decisions: Vec<String>,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        exact: ExactArgs,
    },
}

#[derive(Serialize)]
struct SolveReport {
    algorithm: Algorithm,
    /// Exact-solver status; absent for heuristics.
    #[serde(skip_serializing_if = "Option::is_none")]
    status: Option<SolveStatus>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nodes: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    root_bound: Option<f64>,
    wall_time_ms: f64,
    normalized_total: f64,
    normalized_per_terminal: f64,
    feasibility: FeasibilityReport,
    breakdown: CostBreakdown,
    decision: Decision,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_scenario(path: &Path) -> Result<Scenario> {
    Ok(Scenario::from_json(&read(path)?)?)
}

fn solve(sc: &Scenario, algo: Algorithm, limits: &SolveLimits) -> Result<SolveReport> {
    let start = Instant::now();
    let (decision, status, nodes, root_bound) = match algo {
        Algorithm::Ilp => {
            let model = build_model(sc)?;
            let r = solve_exact(sc, &model, limits)?;
            (r.decision, Some(r.status), Some(r.nodes), Some(r.root_bound))
        }
        Algorithm::Gco => (gco(sc), None, None, None),
        Algorithm::Nfco => (nfco(sc), None, None, None),
        Algorithm::Dco => (dco(sc), None, None, None),
    };
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    let breakdown = evaluate(sc, &decision, &Normalizers::dco(sc)?)?;
    Ok(SolveReport {
        algorithm: algo,
        status,
        nodes,
        root_bound,
        wall_time_ms,
        normalized_total: breakdown.normalized_total,
        normalized_per_terminal: breakdown.normalized_per_terminal,
        feasibility: check_feasibility(sc, &decision)?,
        breakdown,
        decision,
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { config, seed, out } => {
            let cfg: GenerationConfig = match config {
                Some(path) => serde_json::from_str(&read(&path)?).with_context(|| format!("parsing {}", path.display()))?,
                None => GenerationConfig::default(),
            };
            let sc = generate_scenario(&cfg, seed)?;
            write_or_print(out.as_deref(), &(sc.to_json() + "\n"))
        }
        Command::Solve { scenario, algo, out, exact } => {
            let sc = load_scenario(&scenario)?;
            let report = solve(&sc, algo, &exact.limits())?;
            write_or_print(out.as_deref(), &(serde_json::to_string_pretty(&report)? + "\n"))
        }
        Command::ExportLp { scenario, out } => {
            let sc = load_scenario(&scenario)?;
            write_or_print(out.as_deref(), &export_lp(&build_model(&sc)?))
        }
        Command::Sweep { spec, out_dir, workers } => {
            let spec = SweepSpec::from_json(&read(&spec)?)?;
            let workers = workers.unwrap_or_else(satchain_core::experiment::workers_from_env);
            let table = run_sweep_with(&spec, workers)?;
            let files = emit_results(&table, &out_dir)?;
            println!("{:>14} {:>6} {:>10} {:>10} {:>6} {:>6} {:>12}", table.parameter.name(), "algo", "mean", "std", "n", "fail", "time_ms");
            for r in &table.rows {
                let f = |x: Option<f64>| x.map_or("-".into(), |v| format!("{v:.5}"));
                println!(
                    "{:>14} {:>6} {:>10} {:>10} {:>6} {:>6} {:>12}",
                    r.value,
                    r.algorithm.name(),
                    f(r.mean),
                    f(r.std),
                    r.count,
                    r.failures,
                    r.mean_time_ms.map_or("-".into(), satchain_core::experiment::format_ms)
                );
            }
            for note in &table.metadata.notes {
                println!("note: {note}");
            }
            for path in files {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Compare { scenario, algos, decisions, json, exact } => {
            let sc = load_scenario(&scenario)?;
            let mut contenders: Vec<Contender> = algos.into_iter().map(Contender::Algorithm).collect();
            for entry in decisions {
                let Some((label, path)) = entry.split_once('=') else {
                    bail!("--decision expects label=path, got '{entry}'");
                };
                let path = Path::new(path);
                let decision: Decision =
                    serde_json::from_str(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
                contenders.push(Contender::Decision { label: label.to_string(), decision });
            }
            if contenders.is_empty() {
                bail!("nothing to compare");
            }
            let report = compare_single(&sc, &contenders, &exact.limits())?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                print!("{report}");
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
}

#[derive(Serialize)]
struct Envelope<'a> {
    error: ErrorBody<'a>,
}

fn fail(kind: &str, message: String) -> ExitCode {
    let envelope = Envelope { error: ErrorBody { kind, message } };
    eprintln!("{}", serde_json::to_string(&envelope).expect("error envelope serializes"));
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", e.render().to_string().trim_end().to_string()),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = e
                .chain()
                .find_map(|c| c.downcast_ref::<satchain_core::Error>().map(satchain_core::Error::kind))
                .or_else(|| e.chain().find_map(|c| c.downcast_ref::<std::io::Error>().map(|_| "io")))
                .or_else(|| e.chain().find_map(|c| c.downcast_ref::<serde_json::Error>().map(|_| "json")))
                .unwrap_or("error");
            fail(kind, format!("{e:#}"))
        }
    }
}
