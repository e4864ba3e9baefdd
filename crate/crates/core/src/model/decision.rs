use serde::{Deserialize, Serialize};

use super::types::Scenario;
use crate::error::{Error, Result};

/// Hosts of one terminal's chain, by position: `Some(s)` for satellite `s`,
/// `None` for the data center.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Placement {
    pub hosts: Vec<Option<usize>>,
}

impl Placement {
    pub fn new(hosts: Vec<Option<usize>>) -> Self {
        Self { hosts }
    }

    pub fn data_center(len: usize) -> Self {
        Self { hosts: vec![None; len] }
    }

    /// Number of leading satellite-served positions.
    pub fn prefix_len(&self) -> usize {
        self.hosts.iter().take_while(|h| h.is_some()).count()
    }

    /// True when no satellite-served position follows a data-center one.
    pub fn is_prefix(&self) -> bool {
        self.hosts[self.prefix_len()..].iter().all(Option::is_none)
    }

    /// Sort key: host index per position with the data center ranked last.
    pub fn key(&self, n_satellites: usize) -> impl Iterator<Item = usize> + '_ {
        self.hosts.iter().map(move |h| h.unwrap_or(n_satellites))
    }
}

/// Caching matrix `X[k][s]` and offloading tensor `Y[u][k][s]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "DecisionDoc", try_from = "DecisionDoc")]
pub struct Decision {
    n_nfs: usize,
    n_satellites: usize,
    n_terminals: usize,
    cached: Vec<bool>,
    served: Vec<bool>,
}

impl Decision {
    pub fn zeros(n_nfs: usize, n_satellites: usize, n_terminals: usize) -> Self {
        Self {
            n_nfs,
            n_satellites,
            n_terminals,
            cached: vec![false; n_nfs * n_satellites],
            served: vec![false; n_terminals * n_nfs * n_satellites],
        }
    }

    pub fn for_scenario(scenario: &Scenario) -> Self {
        Self::zeros(scenario.n_nfs(), scenario.n_satellites(), scenario.n_terminals())
    }

    /// Builds `Y` from per-terminal placements and caches exactly the
    /// `(k, s)` pairs that some placement uses.
    pub fn from_placements(scenario: &Scenario, placements: &[Placement]) -> Self {
        let mut d = Self::for_scenario(scenario);
        for (u, p) in placements.iter().enumerate() {
            for (i, host) in p.hosts.iter().enumerate() {
                if let Some(s) = *host {
                    let k = scenario.nf_at(u, i);
                    d.set_y(u, k, s, true);
                    d.set_x(k, s, true);
                }
            }
        }
        d
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.n_nfs, self.n_satellites, self.n_terminals)
    }

    pub fn check_shape(&self, scenario: &Scenario) -> Result<()> {
        let expected = (scenario.n_nfs(), scenario.n_satellites(), scenario.n_terminals());
        if self.shape() != expected {
            return Err(Error::DecisionShape {
                expected: format!("(K={}, S={}, U={})", expected.0, expected.1, expected.2),
                found: format!("(K={}, S={}, U={})", self.n_nfs, self.n_satellites, self.n_terminals),
            });
        }
        Ok(())
    }

    pub fn x(&self, k: usize, s: usize) -> bool {
        self.cached[k * self.n_satellites + s]
    }

    pub fn set_x(&mut self, k: usize, s: usize, v: bool) {
        self.cached[k * self.n_satellites + s] = v;
    }

    pub fn y(&self, u: usize, k: usize, s: usize) -> bool {
        self.served[(u * self.n_nfs + k) * self.n_satellites + s]
    }

    pub fn set_y(&mut self, u: usize, k: usize, s: usize, v: bool) {
        self.served[(u * self.n_nfs + k) * self.n_satellites + s] = v;
    }

    /// Satellites serving terminal `u`'s request for NF `k`.
    pub fn hosts(&self, u: usize, k: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_satellites).filter(move |&s| self.y(u, k, s))
    }

    /// Reads back terminal `u`'s placement. Fails if a position has more than
    /// one serving satellite; does not check the prefix rule.
    pub fn placement(&self, scenario: &Scenario, u: usize) -> Result<Placement> {
        let hosts = scenario
            .chain_of(u)
            .iter()
            .enumerate()
            .map(|(position, &k)| {
                let mut it = self.hosts(u, k);
                let first = it.next();
                let extra = it.count();
                if extra > 0 {
                    return Err(Error::MultipleHosts { terminal: u, position, count: extra + 1 });
                }
                Ok(first)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Placement::new(hosts))
    }

    pub fn cached_pairs(&self) -> Vec<[usize; 2]> {
        let mut out = Vec::new();
        for k in 0..self.n_nfs {
            for s in 0..self.n_satellites {
                if self.x(k, s) {
                    out.push([k, s]);
                }
            }
        }
        out
    }

    pub fn served_triples(&self) -> Vec<[usize; 3]> {
        let mut out = Vec::new();
        for u in 0..self.n_terminals {
            for k in 0..self.n_nfs {
                for s in 0..self.n_satellites {
                    if self.y(u, k, s) {
                        out.push([u, k, s]);
                    }
                }
            }
        }
        out
    }

    /// Deterministic tie-break key: for each terminal in index order, the
    /// host of each chain position (data center ranked after every
    /// satellite). Lexicographically smaller keys win among equal-cost
    /// optima.
    pub fn canonical_key(&self, scenario: &Scenario) -> Vec<usize> {
        let s_count = scenario.n_satellites();
        let mut key = Vec::with_capacity(scenario.n_terminals() * scenario.chain_length);
        for u in 0..scenario.n_terminals() {
            for &k in scenario.chain_of(u) {
                key.push(self.hosts(u, k).next().unwrap_or(s_count));
            }
        }
        key
    }
}

/// Sparse JSON form: index lists of the nonzero entries.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct DecisionDoc {
    nfs: usize,
    satellites: usize,
    terminals: usize,
    cached: Vec<[usize; 2]>,
    served: Vec<[usize; 3]>,
}

impl From<Decision> for DecisionDoc {
    fn from(d: Decision) -> Self {
        DecisionDoc {
            nfs: d.n_nfs,
            satellites: d.n_satellites,
            terminals: d.n_terminals,
            cached: d.cached_pairs(),
            served: d.served_triples(),
        }
    }
}

impl TryFrom<DecisionDoc> for Decision {
    type Error = String;

    fn try_from(doc: DecisionDoc) -> std::result::Result<Self, String> {
        let mut d = Decision::zeros(doc.nfs, doc.satellites, doc.terminals);
        for [k, s] in doc.cached {
            if k >= doc.nfs || s >= doc.satellites {
                return Err(format!("cached entry ({k}, {s}) out of range"));
            }
            d.set_x(k, s, true);
        }
        for [u, k, s] in doc.served {
            if u >= doc.terminals || k >= doc.nfs || s >= doc.satellites {
                return Err(format!("served entry ({u}, {k}, {s}) out of range"));
            }
            d.set_y(u, k, s, true);
        }
        Ok(d)
    }
}
