use serde::{Deserialize, Serialize};

use super::topology::Topology;

/// Per-NF requirements and per-satellite edge-server resources.
///
/// Units: cycles/bit, bits, cycles/s. `kappa` is the effective switched
/// capacitance of the edge CPUs (W·s³/cycle³).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NfCatalog {
    /// `c_k`: CPU cycles needed per input bit of NF `k`.
    pub cycles_per_bit: Vec<f64>,
    /// `l_k`: storage footprint of NF `k`.
    pub nf_storage: Vec<f64>,
    /// `C_s`: compute capacity of satellite `s`.
    pub sat_compute: Vec<f64>,
    /// `L_s`: storage capacity of satellite `s`.
    pub sat_storage: Vec<f64>,
    /// `f_ks`, indexed `[k][s]`: compute granted to one request of NF `k` on satellite `s`.
    pub allocation: Vec<Vec<f64>>,
    /// `f_g`: compute granted to one NF request in the data center.
    pub dc_allocation: f64,
    pub kappa: f64,
}

impl NfCatalog {
    pub fn n_nfs(&self) -> usize {
        self.cycles_per_bit.len()
    }

    pub fn n_satellites(&self) -> usize {
        self.sat_compute.len()
    }

    pub fn f(&self, k: usize, s: usize) -> f64 {
        self.allocation[k][s]
    }
}

/// Ordered NF identifiers; position `i` runs NF `nfs[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ServiceChain {
    pub nfs: Vec<usize>,
}

impl ServiceChain {
    pub fn new(nfs: Vec<usize>) -> Self {
        Self { nfs }
    }

    pub fn position_of(&self, k: usize) -> Option<usize> {
        self.nfs.iter().position(|&n| n == k)
    }
}

/// A terminal's access satellite(s), requested service(s) and per-position
/// input sizes in bits. Association and request are stored as indicator
/// index lists; a valid scenario has exactly one entry in each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Terminal {
    pub associated: Vec<usize>,
    pub requested: Vec<usize>,
    pub input_sizes: Vec<f64>,
}

impl Terminal {
    pub fn new(satellite: usize, service: usize, input_sizes: Vec<f64>) -> Self {
        Self { associated: vec![satellite], requested: vec![service], input_sizes }
    }

    pub fn satellite(&self) -> usize {
        self.associated[0]
    }

    pub fn service(&self) -> usize {
        self.requested[0]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub topology: Topology,
    pub catalog: NfCatalog,
    /// Number of NFs `I` in every service chain.
    pub chain_length: usize,
    pub chains: Vec<ServiceChain>,
    pub terminals: Vec<Terminal>,
    /// Latency weight in the objective; energy gets `1 - alpha`.
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Scenario {
    pub fn n_terminals(&self) -> usize {
        self.terminals.len()
    }

    pub fn n_satellites(&self) -> usize {
        self.topology.n_satellites
    }

    pub fn n_nfs(&self) -> usize {
        self.catalog.n_nfs()
    }

    /// The chain requested by terminal `u`.
    pub fn chain_of(&self, u: usize) -> &[usize] {
        &self.chains[self.terminals[u].service()].nfs
    }

    pub fn nf_at(&self, u: usize, position: usize) -> usize {
        self.chain_of(u)[position]
    }

    pub fn input(&self, u: usize, position: usize) -> f64 {
        self.terminals[u].input_sizes[position]
    }

    pub fn access_satellite(&self, u: usize) -> usize {
        self.terminals[u].satellite()
    }

    pub fn hops(&self, s: usize, t: usize) -> f64 {
        self.topology.hops(s, t) as f64
    }

    pub fn total_input(&self, u: usize) -> f64 {
        self.terminals[u].input_sizes.iter().sum()
    }

    pub fn from_json(text: &str) -> crate::Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}
