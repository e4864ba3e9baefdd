//! Latency and energy accounting for one time slot, the weighted normalized
//! objective, and the C1–C5 feasibility checker.
//!
//! Every solver in the crate is scored by [`total_cost`]. Per-terminal costs
//! are computed from a [`Placement`] so that solvers that enumerate
//! placements and the decision-level API produce bit-identical numbers.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Decision, Placement, Scenario};

/// Latency (seconds) and energy (joules) components of one terminal.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TerminalCost {
    /// Uplink transmission time, `l_u1 / r_u`.
    pub uplink_transmission: f64,
    /// Uplink round trip: transmission plus `2 d_u / c`.
    pub uplink_rt: f64,
    pub isl_transmission: f64,
    pub isl_propagation: f64,
    pub sat_compute: f64,
    pub ground_transmission: f64,
    pub ground_compute: f64,
    pub ground_propagation: f64,
    pub total_latency: f64,
    pub uplink_energy: f64,
    pub isl_energy: f64,
    pub compute_energy: f64,
    pub downlink_energy: f64,
    pub total_energy: f64,
}

/// Per-terminal DCO latency and energy used to normalize the objective.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Normalizers {
    pub latency: Vec<f64>,
    pub energy: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Each terminal's latency and energy divided by its own DCO values.
    #[default]
    PerTerminal,
    /// Every terminal divided by the scenario-mean DCO latency and energy.
    Aggregate,
}

impl Normalizers {
    /// Per-terminal DCO normalizers.
    pub fn dco(sc: &Scenario) -> Result<Self> {
        Self::new(sc, Normalization::PerTerminal)
    }

    pub fn new(sc: &Scenario, mode: Normalization) -> Result<Self> {
        let dc = Placement::data_center(sc.chain_length);
        let costs = (0..sc.n_terminals()).map(|u| terminal_cost(sc, u, &dc)).collect::<Result<Vec<_>>>()?;
        let mut latency: Vec<f64> = costs.iter().map(|c| c.total_latency).collect();
        let mut energy: Vec<f64> = costs.iter().map(|c| c.total_energy).collect();
        if mode == Normalization::Aggregate && !costs.is_empty() {
            let n = costs.len() as f64;
            let t = latency.iter().sum::<f64>() / n;
            let e = energy.iter().sum::<f64>() / n;
            latency.iter_mut().for_each(|x| *x = t);
            energy.iter_mut().for_each(|x| *x = e);
        }
        let norms = Self { latency, energy };
        norms.check()?;
        Ok(norms)
    }

    fn check(&self) -> Result<()> {
        for (terminal, (&t, &e)) in self.latency.iter().zip(&self.energy).enumerate() {
            if !(t > 0.0) {
                return Err(Error::ZeroNormalizer { terminal, what: "latency" });
            }
            if !(e > 0.0) {
                return Err(Error::ZeroNormalizer { terminal, what: "energy" });
            }
        }
        Ok(())
    }

    /// `alpha * T / T_dco + (1 - alpha) * E / E_dco` for terminal `u`.
    pub fn weigh(&self, alpha: f64, u: usize, c: &TerminalCost) -> f64 {
        alpha * (c.total_latency / self.latency[u]) + (1.0 - alpha) * (c.total_energy / self.energy[u])
    }
}

/// Full cost report for one decision.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostBreakdown {
    pub terminals: Vec<TerminalCost>,
    /// Per-terminal weighted normalized cost; these sum to `normalized_total`.
    pub terminal_normalized: Vec<f64>,
    pub total_latency: f64,
    pub total_energy: f64,
    /// The objective `Δ`.
    pub normalized_total: f64,
    /// `Δ / |U|`; exactly 1 for the data-center-only decision.
    pub normalized_per_terminal: f64,
}

/// Evaluates terminal `u` under `placement`. The placement must obey the
/// monotone data-center prefix rule.
pub fn terminal_cost(sc: &Scenario, u: usize, placement: &Placement) -> Result<TerminalCost> {
    let prefix = placement.prefix_len();
    if let Some(offset) = placement.hosts[prefix..].iter().position(Option::is_some) {
        return Err(Error::PrefixOrder { terminal: u, position: prefix + offset });
    }
    let link = &sc.topology.link;
    let cat = &sc.catalog;

    let uplink_transmission = sc.input(u, 0) / link.r_u;
    let uplink_rt = uplink_transmission + 2.0 * link.d_u / link.light_speed;
    let (isl_transmission, isl_propagation) = isl_components(sc, u, placement);
    let sat_compute = sat_compute_component(sc, u, placement);
    let (ground_transmission, ground_compute, ground_propagation) = ground_components(sc, u, placement);

    let compute_energy: f64 = placement
        .hosts
        .iter()
        .enumerate()
        .filter_map(|(i, h)| h.map(|s| (i, s)))
        .map(|(i, s)| {
            let k = sc.nf_at(u, i);
            let f = cat.f(k, s);
            cat.kappa * cat.cycles_per_bit[k] * sc.input(u, i) * f * f
        })
        .sum();

    let uplink_energy = link.p_u_w * uplink_transmission;
    let isl_energy = link.p_s_w * isl_transmission;
    let downlink_energy = link.p_g_w * ground_transmission;

    Ok(TerminalCost {
        uplink_transmission,
        uplink_rt,
        isl_transmission,
        isl_propagation,
        sat_compute,
        ground_transmission,
        ground_compute,
        ground_propagation,
        total_latency: uplink_rt
            + (isl_transmission + isl_propagation + sat_compute)
            + (ground_transmission + ground_compute + ground_propagation),
        uplink_energy,
        isl_energy,
        compute_energy,
        downlink_energy,
        total_energy: uplink_energy + isl_energy + downlink_energy + compute_energy,
    })
}

/// ISL transmission and propagation delay. The first NF is reached from the
/// access satellite, consecutive satellite-hosted NFs exchange their
/// intermediate data, and the last NF's host returns the result to the
/// access satellite.
fn isl_components(sc: &Scenario, u: usize, p: &Placement) -> (f64, f64) {
    let link = &sc.topology.link;
    let access = sc.access_satellite(u);
    let last = p.hosts.len() - 1;
    let mut bits_hops = 0.0;
    let mut hops = 0.0;
    if let Some(s) = p.hosts[0] {
        bits_hops += sc.input(u, 0) * sc.hops(access, s);
        hops += sc.hops(access, s);
    }
    if let Some(s) = p.hosts[last] {
        hops += sc.hops(access, s);
    }
    for i in 0..last {
        if let (Some(a), Some(b)) = (p.hosts[i], p.hosts[i + 1]) {
            bits_hops += sc.input(u, i + 1) * sc.hops(a, b);
            hops += sc.hops(a, b);
        }
    }
    (bits_hops / link.r_s, hops * link.d_s / link.light_speed)
}

fn sat_compute_component(sc: &Scenario, u: usize, p: &Placement) -> f64 {
    let cat = &sc.catalog;
    p.hosts
        .iter()
        .enumerate()
        .filter_map(|(i, h)| h.map(|s| (i, s)))
        .map(|(i, s)| {
            let k = sc.nf_at(u, i);
            cat.cycles_per_bit[k] * sc.input(u, i) / cat.f(k, s)
        })
        .sum()
}

/// Downlink transmission, data-center compute and ground propagation. The
/// whole chain's input is downlinked when the first NF runs on the ground;
/// otherwise the input of the first ground-served position is downlinked at
/// the satellite-to-ground transition.
fn ground_components(sc: &Scenario, u: usize, p: &Placement) -> (f64, f64, f64) {
    let link = &sc.topology.link;
    let cat = &sc.catalog;
    let served = |i: usize| p.hosts[i].is_some();
    let mut tx_bits = if served(0) { 0.0 } else { sc.input(u, 0) };
    for i in 0..p.hosts.len() - 1 {
        if served(i) != served(i + 1) {
            tx_bits += sc.input(u, i + 1);
        }
    }
    let compute = (0..p.hosts.len())
        .filter(|&i| !served(i))
        .map(|i| cat.cycles_per_bit[sc.nf_at(u, i)] * sc.input(u, i) / cat.dc_allocation)
        .sum();
    let any_ground = (0..p.hosts.len()).any(|i| !served(i));
    let propagation = if any_ground { 2.0 * link.d_g / link.light_speed } else { 0.0 };
    (tx_bits / link.r_g, compute, propagation)
}

/// Terminal `u`'s cost under `d`.
pub fn evaluate_terminal(sc: &Scenario, d: &Decision, u: usize) -> Result<TerminalCost> {
    d.check_shape(sc)?;
    terminal_cost(sc, u, &d.placement(sc, u)?)
}

/// Uplink round-trip latency; independent of the decision.
pub fn uplink_roundtrip(sc: &Scenario, u: usize) -> f64 {
    let link = &sc.topology.link;
    sc.input(u, 0) / link.r_u + 2.0 * link.d_u / link.light_speed
}

/// ISL `(transmission, propagation)` delay of terminal `u`.
pub fn isl_costs(sc: &Scenario, d: &Decision, u: usize) -> Result<(f64, f64)> {
    d.check_shape(sc)?;
    Ok(isl_components(sc, u, &d.placement(sc, u)?))
}

pub fn satellite_compute_delay(sc: &Scenario, d: &Decision, u: usize) -> Result<f64> {
    d.check_shape(sc)?;
    Ok(sat_compute_component(sc, u, &d.placement(sc, u)?))
}

/// Ground `(transmission, compute, propagation)` delay of terminal `u`.
/// Rejects placements that break the data-center prefix rule.
pub fn ground_costs(sc: &Scenario, d: &Decision, u: usize) -> Result<(f64, f64, f64)> {
    let c = evaluate_terminal(sc, d, u)?;
    Ok((c.ground_transmission, c.ground_compute, c.ground_propagation))
}

pub fn total_latency(sc: &Scenario, d: &Decision, u: usize) -> Result<f64> {
    Ok(evaluate_terminal(sc, d, u)?.total_latency)
}

pub fn total_energy(sc: &Scenario, d: &Decision, u: usize) -> Result<f64> {
    Ok(evaluate_terminal(sc, d, u)?.total_energy)
}

/// The objective `Δ`: sum over terminals (in index order) of the weighted
/// normalized latency and energy.
pub fn total_cost(sc: &Scenario, d: &Decision, norms: &Normalizers) -> Result<f64> {
    Ok(evaluate(sc, d, norms)?.normalized_total)
}

pub fn evaluate(sc: &Scenario, d: &Decision, norms: &Normalizers) -> Result<CostBreakdown> {
    d.check_shape(sc)?;
    norms.check()?;
    let terminals = (0..sc.n_terminals()).map(|u| evaluate_terminal(sc, d, u)).collect::<Result<Vec<_>>>()?;
    let terminal_normalized: Vec<f64> =
        terminals.iter().enumerate().map(|(u, c)| norms.weigh(sc.alpha, u, c)).collect();
    let normalized_total = sum_in_order(&terminal_normalized);
    Ok(CostBreakdown {
        total_latency: terminals.iter().map(|c| c.total_latency).sum(),
        total_energy: terminals.iter().map(|c| c.total_energy).sum(),
        normalized_per_terminal: if terminals.is_empty() { 0.0 } else { normalized_total / terminals.len() as f64 },
        terminals,
        terminal_normalized,
        normalized_total,
    })
}

/// Left-to-right sum. Solvers that score placements per terminal use this
/// so their totals match [`total_cost`] bit for bit.
pub fn sum_in_order(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |acc, &v| acc + v)
}

/// One violated constraint.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "constraint")]
pub enum Violation {
    /// Compute allocated on a satellite exceeds its capacity.
    C1 { satellite: usize, used: f64, capacity: f64 },
    /// Cached NF images exceed a satellite's storage.
    C2 { satellite: usize, used: f64, capacity: f64 },
    /// A request is served by a satellite that does not cache the NF.
    C3 { terminal: usize, nf: usize, satellite: usize },
    /// A request is served by more than one satellite.
    C4 { terminal: usize, nf: usize, count: usize },
    /// A satellite serves a chain position after an earlier position went to the data center.
    C5 { terminal: usize, position: usize },
}

impl Violation {
    pub fn constraint(&self) -> &'static str {
        match self {
            Violation::C1 { .. } => "C1",
            Violation::C2 { .. } => "C2",
            Violation::C3 { .. } => "C3",
            Violation::C4 { .. } => "C4",
            Violation::C5 { .. } => "C5",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::C1 { satellite, used, capacity } => {
                write!(f, "C1 satellite {satellite}: compute {used:.4e} > capacity {capacity:.4e} cycles/s")
            }
            Violation::C2 { satellite, used, capacity } => {
                write!(f, "C2 satellite {satellite}: storage {used:.4e} > capacity {capacity:.4e} bits")
            }
            Violation::C3 { terminal, nf, satellite } => {
                write!(f, "C3 terminal {terminal}: NF {nf} served by satellite {satellite} which does not cache it")
            }
            Violation::C4 { terminal, nf, count } => {
                write!(f, "C4 terminal {terminal}: NF {nf} served by {count} satellites")
            }
            Violation::C5 { terminal, position } => {
                write!(f, "C5 terminal {terminal}: position {position} served in orbit after a data-center position")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violated(&self, constraint: &str) -> bool {
        self.violations.iter().any(|v| v.constraint() == constraint)
    }
}

impl fmt::Display for FeasibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return writeln!(f, "feasible");
        }
        writeln!(f, "{} violation(s)", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

const CAPACITY_SLACK: f64 = 1e-9;

/// Lists every violated constraint among C1–C5.
pub fn check_feasibility(sc: &Scenario, d: &Decision) -> Result<FeasibilityReport> {
    d.check_shape(sc)?;
    let cat = &sc.catalog;
    let (n_k, n_s, n_u) = (sc.n_nfs(), sc.n_satellites(), sc.n_terminals());
    let mut violations = Vec::new();

    for s in 0..n_s {
        let used: f64 = (0..n_u)
            .flat_map(|u| (0..n_k).map(move |k| (u, k)))
            .filter(|&(u, k)| d.y(u, k, s))
            .map(|(_, k)| cat.f(k, s))
            .sum();
        let capacity = cat.sat_compute[s];
        if used > capacity * (1.0 + CAPACITY_SLACK) {
            violations.push(Violation::C1 { satellite: s, used, capacity });
        }
    }
    for s in 0..n_s {
        let used: f64 = (0..n_k).filter(|&k| d.x(k, s)).map(|k| cat.nf_storage[k]).sum();
        let capacity = cat.sat_storage[s];
        if used > capacity * (1.0 + CAPACITY_SLACK) {
            violations.push(Violation::C2 { satellite: s, used, capacity });
        }
    }
    for u in 0..n_u {
        for k in 0..n_k {
            for s in 0..n_s {
                if d.y(u, k, s) && !d.x(k, s) {
                    violations.push(Violation::C3 { terminal: u, nf: k, satellite: s });
                }
            }
        }
    }
    for u in 0..n_u {
        for k in 0..n_k {
            let count = d.hosts(u, k).count();
            if count > 1 {
                violations.push(Violation::C4 { terminal: u, nf: k, count });
            }
        }
    }
    for u in 0..n_u {
        let g: Vec<usize> = sc.chain_of(u).iter().map(|&k| d.hosts(u, k).count()).collect();
        for i in 0..g.len().saturating_sub(1) {
            if g[i] < g[i + 1] {
                violations.push(Violation::C5 { terminal: u, position: i + 1 });
            }
        }
    }
    Ok(FeasibilityReport { violations })
}
