//! Joint service-chain caching and computation offloading for an
//! edge-computing LEO satellite constellation.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: constellation topology, NF catalog, scenarios and decisions.
//! * [`cost`]: latency / energy evaluation, the weighted normalized objective
//!   and the C1–C5 feasibility checker. This is the ground truth every solver
//!   is measured against.
//! * [`ilp`]: the linearized integer program (auxiliary product, XOR and
//!   indicator variables), LP-format export/import, an exact
//!   branch-and-bound solver and a brute-force oracle.
//! * [`heuristics`]: the order-aware greedy (GCO), the order-oblivious greedy
//!   (NFCO) and the data-center-only baseline (DCO).
//! * [`experiment`]: seeded parameter sweeps, result tables and single
//!   scenario comparisons.

pub mod cost;
pub mod error;
pub mod experiment;
pub mod heuristics;
pub mod ilp;
pub mod model;

pub use cost::{CostBreakdown, FeasibilityReport, Normalizers, TerminalCost, Violation};
pub use error::{Error, Result};
pub use heuristics::{dco, gco, nfco, Algorithm, GreedyOptions};
pub use ilp::{brute_force_oracle, build_model, solve_exact, IlpModel, SolveLimits, SolveResult, SolveStatus, TieBreak};
pub use experiment::{compare_single, emit_results, run_sweep, ResultTable, SweepParameter, SweepSpec};
pub use model::{
    build_topology, generate_scenario, validate_scenario, Decision, GenerationConfig, LinkParams, NfCatalog,
    Scenario, ServiceChain, Terminal, Topology,
};
