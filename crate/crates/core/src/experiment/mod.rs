//! Seeded parameter sweeps over generated scenarios, result tables and
//! their CSV / JSON output, and single-scenario comparisons.
//!
//! Every scenario at grid point `p`, replicate `r` is generated from
//! [`scenario_seed`]`(master_seed, p, r)`, and per-scenario results are
//! aggregated in replicate order, so cost columns are reproducible for any
//! worker count. Costs are `Δ / |U|`, which is exactly one for DCO.

mod compare;
mod output;
mod spec;
mod sweep;

pub use compare::{compare_single, Column, Comparison, Contender};
pub use output::{
    cost_rows, emit_results, format_ms, load_results_csv, write_cost_figure, write_results_csv, write_runtime_csv,
    write_runtime_figure, write_samples_csv, CostRow,
};
pub use spec::{ExactSettings, LimitPolicy, SweepParameter, SweepSpec};
pub use sweep::{
    run_sweep, run_sweep_with, scenario_seed, workers_from_env, ResultRow, ResultTable, RunStatus, Sample,
    SweepMetadata, WORKERS_ENV,
};
