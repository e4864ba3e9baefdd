use std::fmt::{self, Write as _};

use serde::Serialize;

use super::sweep::run_algorithm;
use crate::cost::{check_feasibility, evaluate, CostBreakdown, FeasibilityReport, Normalizers};
use crate::error::Result;
use crate::heuristics::Algorithm;
use crate::ilp::SolveLimits;
use crate::model::{Decision, Scenario};

/// One column of a comparison: an algorithm to run or a given decision.
#[derive(Debug, Clone)]
pub enum Contender {
    Algorithm(Algorithm),
    Decision { label: String, decision: Decision },
}

#[derive(Debug, Clone, Serialize)]
pub struct Column {
    pub label: String,
    pub decision: Decision,
    pub feasibility: FeasibilityReport,
    /// Missing when the decision breaks the prefix rule or serves a
    /// position from two satellites, so its cost is undefined.
    pub breakdown: Option<CostBreakdown>,
    pub cost_error: Option<String>,
    /// True when an exact solve stopped at its limit.
    pub limited: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    pub columns: Vec<Column>,
}

/// Runs or evaluates each contender on `sc`. `limits` applies to exact
/// solves.
pub fn compare_single(sc: &Scenario, contenders: &[Contender], limits: &SolveLimits) -> Result<Comparison> {
    let norms = Normalizers::dco(sc)?;
    let columns = contenders
        .iter()
        .map(|c| {
            let (label, decision, limited) = match c {
                Contender::Algorithm(a) => {
                    let (d, limited) = run_algorithm(sc, *a, limits)?;
                    (a.to_string(), d, limited)
                }
                Contender::Decision { label, decision } => (label.clone(), decision.clone(), false),
            };
            let feasibility = check_feasibility(sc, &decision)?;
            let (breakdown, cost_error) = match evaluate(sc, &decision, &norms) {
                Ok(b) => (Some(b), None),
                Err(e) => (None, Some(e.to_string())),
            };
            Ok(Column { label, decision, feasibility, breakdown, cost_error, limited })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Comparison { columns })
}

impl Comparison {
    pub fn column(&self, label: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.label == label)
    }
}

fn cell(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.6}"))
}

fn delta(x: Option<f64>, base: Option<f64>) -> String {
    match (x, base) {
        (Some(a), Some(b)) => format!("{:+.6}", a - b),
        _ => "-".to_string(),
    }
}

fn diff<T: PartialEq + fmt::Debug>(from: &[T], to: &[T]) -> String {
    let added: Vec<&T> = to.iter().filter(|t| !from.contains(t)).collect();
    let removed: Vec<&T> = from.iter().filter(|t| !to.contains(t)).collect();
    if added.is_empty() && removed.is_empty() {
        return "same".to_string();
    }
    let mut s = String::new();
    for a in added {
        let _ = write!(s, " +{a:?}");
    }
    for r in removed {
        let _ = write!(s, " -{r:?}");
    }
    s.trim_start().to_string()
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(first) = self.columns.first() else { return writeln!(f, "nothing to compare") };
        let n_u = self.columns.iter().find_map(|c| c.breakdown.as_ref()).map_or(0, |b| b.terminals.len());
        let norm = |c: &Column, u: usize| c.breakdown.as_ref().map(|b| b.terminal_normalized[u]);

        writeln!(f, "normalized cost per terminal (deltas against {})", first.label)?;
        write!(f, "{:>8}", "terminal")?;
        for (i, c) in self.columns.iter().enumerate() {
            write!(f, " {:>12}", c.label)?;
            if i > 0 {
                write!(f, " {:>12}", format!("d {}", c.label))?;
            }
        }
        writeln!(f)?;
        let row = |f: &mut fmt::Formatter<'_>, name: &str, get: &dyn Fn(&Column) -> Option<f64>| -> fmt::Result {
            write!(f, "{name:>8}")?;
            for (i, c) in self.columns.iter().enumerate() {
                write!(f, " {:>12}", cell(get(c)))?;
                if i > 0 {
                    write!(f, " {:>12}", delta(get(c), get(first)))?;
                }
            }
            writeln!(f)
        };
        for u in 0..n_u {
            row(f, &u.to_string(), &|c| norm(c, u))?;
        }
        row(f, "total", &|c| c.breakdown.as_ref().map(|b| b.normalized_total))?;
        row(f, "mean", &|c| c.breakdown.as_ref().map(|b| b.normalized_per_terminal))?;
        row(f, "T (s)", &|c| c.breakdown.as_ref().map(|b| b.total_latency))?;
        row(f, "E (J)", &|c| c.breakdown.as_ref().map(|b| b.total_energy))?;

        writeln!(f, "\ndecision differences against {}", first.label)?;
        for c in &self.columns[1..] {
            writeln!(f, "  {}: cache {}", c.label, diff(&first.decision.cached_pairs(), &c.decision.cached_pairs()))?;
            writeln!(f, "  {}: offload {}", c.label, diff(&first.decision.served_triples(), &c.decision.served_triples()))?;
        }

        writeln!(f, "\nfeasibility")?;
        for c in &self.columns {
            write!(f, "  {}: {}", c.label, c.feasibility)?;
            if let Some(e) = &c.cost_error {
                writeln!(f, "    cost undefined: {e}")?;
            }
            if c.limited {
                writeln!(f, "    exact solve stopped at its limit; best decision found shown")?;
            }
        }
        Ok(())
    }
}
