use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::topology::{build_topology, dbw_to_watts, LinkParams};
use super::types::{NfCatalog, Scenario, ServiceChain, Terminal};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Association {
    /// Uniform random access satellite per terminal.
    Random,
    /// Terminal `u` attaches to satellite `u mod |S|`.
    RoundRobin,
}

/// How a terminal's per-position input sizes relate along its chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputProfile {
    /// Every position drawn independently.
    Independent,
    /// Independent draws sorted so data never grows along the chain.
    #[default]
    NonIncreasing,
}

/// Scenario generation parameters. SI units throughout (bits, bit/s,
/// cycles/s, meters) except transmit powers, which are given in dBW.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerationConfig {
    pub n_satellites: usize,
    pub link_offsets: Vec<usize>,
    pub n_terminals: usize,
    pub chain_length: usize,
    pub n_nfs: usize,
    pub n_services: usize,
    /// Inclusive range for every `l_uij`.
    pub input_size_range: [f64; 2],
    pub cycles_per_bit: f64,
    /// Inclusive range for NF image sizes `l_k`.
    pub nf_storage_range: [f64; 2],
    pub sat_storage: f64,
    pub sat_compute: f64,
    pub nf_allocation: f64,
    pub dc_allocation: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub d_u: f64,
    pub d_s: f64,
    pub d_g: f64,
    pub r_u: f64,
    pub r_s: f64,
    pub r_g: f64,
    pub p_u_dbw: f64,
    pub p_s_dbw: f64,
    pub p_g_dbw: f64,
    pub light_speed: f64,
    pub association: Association,
    pub input_profile: InputProfile,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        Self {
            n_satellites: 8,
            link_offsets: vec![1, 2],
            n_terminals: 10,
            chain_length: 4,
            n_nfs: 8,
            n_services: 4,
            input_size_range: [1.0e6, 1.0e8],
            cycles_per_bit: 100.0,
            nf_storage_range: [5.0e7, 2.0e8],
            sat_storage: 5.0e8,
            sat_compute: 1.0e10,
            nf_allocation: 2.0e9,
            dc_allocation: 2.0e9,
            kappa: 1.5e-28,
            alpha: 0.5,
            d_u: 1.0e6,
            d_s: 8.0e5,
            d_g: 2.0e6,
            r_u: 2.0e8,
            r_s: 1.0e10,
            r_g: 3.0e8,
            p_u_dbw: 3.0,
            p_s_dbw: 30.0,
            p_g_dbw: 20.0,
            light_speed: 3.0e8,
            association: Association::Random,
            input_profile: InputProfile::NonIncreasing,
        }
    }
}

impl GenerationConfig {
    pub fn link_params(&self) -> LinkParams {
        LinkParams {
            d_u: self.d_u,
            d_s: self.d_s,
            d_g: self.d_g,
            r_u: self.r_u,
            r_s: self.r_s,
            r_g: self.r_g,
            p_u_w: dbw_to_watts(self.p_u_dbw),
            p_s_w: dbw_to_watts(self.p_s_dbw),
            p_g_w: dbw_to_watts(self.p_g_dbw),
            light_speed: self.light_speed,
        }
    }

    fn check(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Generation(msg));
        if self.n_terminals == 0 {
            return fail("zero terminals".into());
        }
        if self.n_nfs == 0 {
            return fail("empty NF catalog".into());
        }
        if self.n_services == 0 {
            return fail("no services".into());
        }
        if self.chain_length == 0 || self.chain_length > self.n_nfs {
            return fail(format!("chain length {} must lie in [1, {}]", self.chain_length, self.n_nfs));
        }
        for (name, [lo, hi]) in [("input_size_range", self.input_size_range), ("nf_storage_range", self.nf_storage_range)] {
            if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                return fail(format!("{name} [{lo}, {hi}] is not a positive interval"));
            }
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return fail(format!("alpha {} outside [0, 1]", self.alpha));
        }
        let positive = [
            ("cycles_per_bit", self.cycles_per_bit),
            ("sat_compute", self.sat_compute),
            ("nf_allocation", self.nf_allocation),
            ("dc_allocation", self.dc_allocation),
            ("kappa", self.kappa),
            ("d_u", self.d_u),
            ("d_s", self.d_s),
            ("d_g", self.d_g),
            ("r_u", self.r_u),
            ("r_s", self.r_s),
            ("r_g", self.r_g),
            ("light_speed", self.light_speed),
        ];
        if let Some((name, v)) = positive.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
            return fail(format!("{name} = {v} must be positive"));
        }
        if !(self.sat_storage >= 0.0) {
            return fail(format!("sat_storage = {} must be non-negative", self.sat_storage));
        }
        if self.nf_allocation > self.sat_compute {
            return fail(format!(
                "nf_allocation {} exceeds satellite compute {}",
                self.nf_allocation, self.sat_compute
            ));
        }
        Ok(())
    }
}

fn uniform(rng: &mut ChaCha8Rng, [lo, hi]: [f64; 2]) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..=hi)
    }
}

/// Draws one scenario. Deterministic in `(config, seed)`.
///
/// Draw order: NF image sizes, service chains (each an ordered sample of
/// `chain_length` distinct NFs), then per terminal its access satellite,
/// requested service and input sizes.
pub fn generate_scenario(config: &GenerationConfig, seed: u64) -> Result<Scenario> {
    config.check()?;
    let mut topology = build_topology(config.n_satellites, &config.link_offsets)?;
    topology.link = config.link_params();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_sats = config.n_satellites;

    let nf_storage = (0..config.n_nfs).map(|_| uniform(&mut rng, config.nf_storage_range)).collect();
    let catalog = uniform_catalog(config, nf_storage);

    let mut pool: Vec<usize> = (0..config.n_nfs).collect();
    let chains = (0..config.n_services)
        .map(|_| {
            let (picked, _) = pool.partial_shuffle(&mut rng, config.chain_length);
            ServiceChain::new(picked.to_vec())
        })
        .collect();

    let terminals = (0..config.n_terminals)
        .map(|u| {
            let satellite = match config.association {
                Association::Random => rng.gen_range(0..n_sats),
                Association::RoundRobin => u % n_sats,
            };
            let service = rng.gen_range(0..config.n_services);
            let mut sizes: Vec<f64> = (0..config.chain_length).map(|_| uniform(&mut rng, config.input_size_range)).collect();
            if config.input_profile == InputProfile::NonIncreasing {
                sizes.sort_by(|a, b| b.total_cmp(a));
            }
            Terminal::new(satellite, service, sizes)
        })
        .collect();

    Ok(Scenario {
        topology,
        catalog,
        chain_length: config.chain_length,
        chains,
        terminals,
        alpha: config.alpha,
        seed: Some(seed),
    })
}

fn uniform_catalog(config: &GenerationConfig, nf_storage: Vec<f64>) -> NfCatalog {
    let n_sats = config.n_satellites;
    NfCatalog {
        cycles_per_bit: vec![config.cycles_per_bit; config.n_nfs],
        nf_storage,
        sat_compute: vec![config.sat_compute; n_sats],
        sat_storage: vec![config.sat_storage; n_sats],
        allocation: vec![vec![config.nf_allocation; n_sats]; config.n_nfs],
        dc_allocation: config.dc_allocation,
        kappa: config.kappa,
    }
}

impl Scenario {
    /// Assembles a hand-specified scenario: topology and catalog come from
    /// `config` (every NF image sized at the low end of
    /// `nf_storage_range`), chains and terminals are taken as given.
    /// `config.n_terminals` and `config.n_services` are ignored.
    pub fn from_parts(config: &GenerationConfig, chains: Vec<ServiceChain>, terminals: Vec<Terminal>) -> Result<Self> {
        let mut topology = build_topology(config.n_satellites, &config.link_offsets)?;
        topology.link = config.link_params();
        let catalog = uniform_catalog(config, vec![config.nf_storage_range[0]; config.n_nfs]);
        Ok(Scenario { topology, catalog, chain_length: config.chain_length, chains, terminals, alpha: config.alpha, seed: None })
    }
}
