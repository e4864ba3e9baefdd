use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::spec::SweepParameter;
use super::sweep::{ResultTable, RunStatus};
use crate::error::Result;
use crate::heuristics::Algorithm;

/// A row of `results.csv`: the cost columns of a [`ResultRow`](super::ResultRow).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostRow {
    pub value: f64,
    pub algorithm: Algorithm,
    pub count: usize,
    pub failures: usize,
    pub budgeted: usize,
    pub skipped: usize,
    pub mean: Option<f64>,
    pub std: Option<f64>,
}

#[derive(Serialize)]
struct RuntimeRow {
    value: f64,
    algorithm: Algorithm,
    attempted: usize,
    mean_time_ms: String,
}

#[derive(Serialize)]
struct SampleRow {
    value: f64,
    replicate: usize,
    seed: u64,
    algorithm: Algorithm,
    status: RunStatus,
    cost: Option<f64>,
}

/// Formats milliseconds with at least four significant digits.
pub fn format_ms(ms: f64) -> String {
    if ms == 0.0 || !ms.is_finite() {
        return format!("{ms:.3}");
    }
    let decimals = (3 - ms.abs().log10().floor() as i32).max(0) as usize;
    format!("{ms:.decimals$}")
}

/// Plot axis name and scale from SI units to the plotted unit.
fn axis(parameter: SweepParameter) -> (&'static str, f64) {
    match parameter {
        SweepParameter::NTerminals => ("terminals", 1.0),
        SweepParameter::UplinkRate => ("uplink_rate_mbps", 1e-6),
        SweepParameter::LeoCapacity => ("leo_capacity_gcycles", 1e-9),
        SweepParameter::NfAllocation => ("nf_allocation_gcycles", 1e-9),
    }
}

pub fn cost_rows(table: &ResultTable) -> Vec<CostRow> {
    table
        .rows
        .iter()
        .map(|r| CostRow {
            value: r.value,
            algorithm: r.algorithm,
            count: r.count,
            failures: r.failures,
            budgeted: r.budgeted,
            skipped: r.skipped,
            mean: r.mean,
            std: r.std,
        })
        .collect()
}

/// Costs only, so the file is byte-identical across runs of one spec.
pub fn write_results_csv<W: Write>(table: &ResultTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in cost_rows(table) {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_results_csv<R: Read>(input: R) -> Result<Vec<CostRow>> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<std::result::Result<Vec<CostRow>, _>>()?)
}

pub fn write_runtime_csv<W: Write>(table: &ResultTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in &table.rows {
        w.serialize(RuntimeRow {
            value: r.value,
            algorithm: r.algorithm,
            attempted: r.count + r.failures,
            mean_time_ms: r.mean_time_ms.map(format_ms).unwrap_or_default(),
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_samples_csv<W: Write>(table: &ResultTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for s in &table.samples {
        w.serialize(SampleRow {
            value: s.value,
            replicate: s.replicate,
            seed: s.seed,
            algorithm: s.algorithm,
            status: s.status,
            cost: s.cost,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Plot-ready cost curve: one row per grid value and algorithm.
pub fn write_cost_figure<W: Write>(table: &ResultTable, out: W) -> Result<()> {
    let (name, scale) = axis(table.parameter);
    let mut w = csv::Writer::from_writer(out);
    w.write_record([name, "algorithm", "mean", "std"])?;
    for r in &table.rows {
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        w.write_record([(r.value * scale).to_string(), r.algorithm.to_string(), opt(r.mean), opt(r.std)])?;
    }
    w.flush()?;
    Ok(())
}

/// Plot-ready runtime curve: one row per grid value and algorithm.
pub fn write_runtime_figure<W: Write>(table: &ResultTable, out: W) -> Result<()> {
    let (name, scale) = axis(table.parameter);
    let mut w = csv::Writer::from_writer(out);
    w.write_record([name, "algorithm", "mean_time_ms"])?;
    for r in &table.rows {
        w.write_record([(r.value * scale).to_string(), r.algorithm.to_string(), r.mean_time_ms.map(format_ms).unwrap_or_default()])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes every output file into `dir` (created if missing) and returns
/// their paths:
///
/// * `results.csv`: cost aggregates per grid value and algorithm;
/// * `runtime.csv`: mean wall time per grid value and algorithm;
/// * `samples.csv`: one row per scenario and algorithm;
/// * `results.json`: rows plus metadata (spec, worker count, notes);
/// * `cost_vs_<parameter>.csv` and `runtime_vs_<parameter>.csv`: plot data.
pub fn emit_results(table: &ResultTable, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let p = table.parameter.name();
    let mut written = Vec::new();
    let mut file = |name: String, body: &dyn Fn(&mut Vec<u8>) -> Result<()>| -> Result<()> {
        let mut buf = Vec::new();
        body(&mut buf)?;
        let path = dir.join(name);
        fs::write(&path, buf)?;
        written.push(path);
        Ok(())
    };
    file("results.csv".into(), &|b| write_results_csv(table, b))?;
    file("runtime.csv".into(), &|b| write_runtime_csv(table, b))?;
    file("samples.csv".into(), &|b| write_samples_csv(table, b))?;
    file("results.json".into(), &|b| {
        serde_json::to_writer_pretty(&mut *b, table)?;
        b.push(b'\n');
        Ok(())
    })?;
    file(format!("cost_vs_{p}.csv"), &|b| write_cost_figure(table, b))?;
    file(format!("runtime_vs_{p}.csv"), &|b| write_runtime_figure(table, b))?;
    Ok(written)
}
