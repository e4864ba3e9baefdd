//! Greedy caching-and-offloading heuristics and the data-center baseline.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::model::{Decision, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Ilp,
    Gco,
    Nfco,
    Dco,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Ilp, Algorithm::Gco, Algorithm::Nfco, Algorithm::Dco];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ilp => "ilp",
            Algorithm::Gco => "gco",
            Algorithm::Nfco => "nfco",
            Algorithm::Dco => "dco",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "ilp" => Ok(Algorithm::Ilp),
            "gco" => Ok(Algorithm::Gco),
            "nfco" => Ok(Algorithm::Nfco),
            "dco" => Ok(Algorithm::Dco),
            other => Err(format!("unknown algorithm '{other}' (expected ilp, gco, nfco or dco)")),
        }
    }
}

/// Request counts `N_iks`: terminals attached to satellite `s` whose chain
/// runs NF `k` at position `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PopularityTable {
    n_nfs: usize,
    n_satellites: usize,
    counts: Vec<usize>,
}

impl PopularityTable {
    pub fn new(sc: &Scenario) -> Self {
        let (n_k, n_s) = (sc.n_nfs(), sc.n_satellites());
        let mut counts = vec![0; sc.chain_length * n_k * n_s];
        for u in 0..sc.n_terminals() {
            let s = sc.access_satellite(u);
            for (i, &k) in sc.chain_of(u).iter().enumerate() {
                counts[(i * n_k + k) * n_s + s] += 1;
            }
        }
        Self { n_nfs: n_k, n_satellites: n_s, counts }
    }

    pub fn get(&self, i: usize, k: usize, s: usize) -> usize {
        self.counts[(i * self.n_nfs + k) * self.n_satellites + s]
    }

    /// Requests for NF `k` at satellite `s` summed over chain positions.
    pub fn across_positions(&self, k: usize, s: usize) -> usize {
        let positions = self.counts.len() / (self.n_nfs * self.n_satellites);
        (0..positions).map(|i| self.get(i, k, s)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GreedyOptions {
    /// Drop satellite service for every position after a request that fell
    /// through to the data center, so the output obeys the prefix rule.
    pub enforce_prefix: bool,
}

impl Default for GreedyOptions {
    fn default() -> Self {
        Self { enforce_prefix: true }
    }
}

/// Basic-operation counters for complexity measurements.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GreedyStats {
    /// Iterations of the (NF, terminal) scan.
    pub scans: u64,
    /// Candidate hosts probed while offloading.
    pub probes: u64,
}

impl GreedyStats {
    pub fn ops(&self) -> u64 {
        self.scans + self.probes
    }
}

/// Mutable greedy state: remaining storage and compute per satellite.
struct Greedy<'a> {
    sc: &'a Scenario,
    decision: Decision,
    storage_left: Vec<f64>,
    compute_left: Vec<f64>,
    nearest: Vec<Vec<usize>>,
    stats: GreedyStats,
}

const SLACK: f64 = 1e-9;

impl<'a> Greedy<'a> {
    fn new(sc: &'a Scenario) -> Self {
        Self {
            sc,
            decision: Decision::for_scenario(sc),
            storage_left: sc.catalog.sat_storage.clone(),
            compute_left: sc.catalog.sat_compute.clone(),
            nearest: (0..sc.n_satellites()).map(|s| sc.topology.by_distance_from(s)).collect(),
            stats: GreedyStats::default(),
        }
    }

    /// Caches `k` at `s` if it fits, then offloads terminal `u`'s request to
    /// the nearest satellite that caches `k` and has compute left.
    fn serve(&mut self, u: usize, k: usize, s: usize) {
        let cat = &self.sc.catalog;
        let size = cat.nf_storage[k];
        if !self.decision.x(k, s) && size <= self.storage_left[s] + SLACK * cat.sat_storage[s] {
            self.decision.set_x(k, s, true);
            self.storage_left[s] -= size;
        }
        for &t in &self.nearest[s] {
            self.stats.probes += 1;
            let f = cat.f(k, t);
            if self.decision.x(k, t) && !self.decision.y(u, k, t) && f <= self.compute_left[t] + SLACK * cat.sat_compute[t] {
                self.decision.set_y(u, k, t, true);
                self.compute_left[t] -= f;
                break;
            }
        }
    }

    fn finish(mut self, opts: &GreedyOptions) -> (Decision, GreedyStats) {
        if opts.enforce_prefix {
            enforce_prefix(self.sc, &mut self.decision);
        }
        (self.decision, self.stats)
    }
}

/// NFs ordered by descending popularity, ties by index.
fn by_popularity(n_nfs: usize, count: impl Fn(usize) -> usize) -> Vec<usize> {
    let mut ks: Vec<usize> = (0..n_nfs).collect();
    ks.sort_by_key(|&k| std::cmp::Reverse(count(k)));
    ks
}

/// Clears satellite service for every chain position after the first
/// data-center position. Caching is left as is.
pub fn enforce_prefix(sc: &Scenario, d: &mut Decision) {
    for u in 0..sc.n_terminals() {
        let chain = sc.chain_of(u);
        if let Some(first_dc) = chain.iter().position(|&k| d.hosts(u, k).next().is_none()) {
            for &k in &chain[first_dc + 1..] {
                for s in 0..sc.n_satellites() {
                    d.set_y(u, k, s, false);
                }
            }
        }
    }
}

/// Order-aware greedy caching and offloading.
pub fn gco(sc: &Scenario) -> Decision {
    gco_with(sc, &GreedyOptions::default()).0
}

/// Walks chain positions first to last; at each position and satellite,
/// NFs are taken by descending position-specific popularity and every
/// attached terminal requesting the NF there is served greedily.
pub fn gco_with(sc: &Scenario, opts: &GreedyOptions) -> (Decision, GreedyStats) {
    let popularity = PopularityTable::new(sc);
    let mut g = Greedy::new(sc);
    for i in 0..sc.chain_length {
        for s in 0..sc.n_satellites() {
            for k in by_popularity(sc.n_nfs(), |k| popularity.get(i, k, s)) {
                for u in 0..sc.n_terminals() {
                    g.stats.scans += 1;
                    if sc.access_satellite(u) == s && sc.nf_at(u, i) == k {
                        g.serve(u, k, s);
                    }
                }
            }
        }
    }
    g.finish(opts)
}

/// Order-oblivious greedy: the same serving rule, but NFs are ranked by
/// popularity summed over chain positions and each NF is placed without
/// regard to where it sits in the chain.
pub fn nfco(sc: &Scenario) -> Decision {
    nfco_with(sc, &GreedyOptions::default()).0
}

pub fn nfco_with(sc: &Scenario, opts: &GreedyOptions) -> (Decision, GreedyStats) {
    let popularity = PopularityTable::new(sc);
    let mut g = Greedy::new(sc);
    for s in 0..sc.n_satellites() {
        for k in by_popularity(sc.n_nfs(), |k| popularity.across_positions(k, s)) {
            for u in 0..sc.n_terminals() {
                g.stats.scans += 1;
                if sc.access_satellite(u) == s && sc.chain_of(u).contains(&k) {
                    g.serve(u, k, s);
                }
            }
        }
    }
    g.finish(opts)
}

/// Everything runs in the data center; satellites only relay.
pub fn dco(sc: &Scenario) -> Decision {
    Decision::for_scenario(sc)
}
