//! Shared fixtures for the criterion benches.

use satchain_core::{generate_scenario, GenerationConfig, Scenario};

/// Default-parameter scenario with `n_terminals` terminals.
pub fn scenario(n_terminals: usize, seed: u64) -> Scenario {
    let cfg = GenerationConfig { n_terminals, ..Default::default() };
    generate_scenario(&cfg, seed).expect("default config generates")
}
