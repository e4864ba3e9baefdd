#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use satchain_core::model::Placement;
use satchain_core::{generate_scenario, GenerationConfig, Scenario};

/// A random instance with |U| <= 3, |S| <= 3, |K| <= 3, I <= 2 and
/// capacities tight enough that caching and compute constraints bind.
pub fn tiny(seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let n_satellites = rng.gen_range(2..=3);
    let chain_length = rng.gen_range(1..=2);
    let cfg = GenerationConfig {
        n_satellites,
        link_offsets: vec![1],
        n_terminals: rng.gen_range(1..=3),
        chain_length,
        n_nfs: rng.gen_range(chain_length..=3),
        n_services: rng.gen_range(1..=2),
        sat_storage: [1.0e8, 2.5e8, 4.0e8][rng.gen_range(0..3)],
        sat_compute: [2.0e9, 4.0e9, 1.0e10][rng.gen_range(0..3)],
        kappa: [1.0e-29, 1.0e-28, 1.0e-27][rng.gen_range(0..3)],
        alpha: [0.0, 0.5, 0.8, 1.0][rng.gen_range(0..4)],
        ..GenerationConfig::default()
    };
    generate_scenario(&cfg, seed).unwrap()
}

/// Random prefix placements, one per terminal, ignoring capacities.
pub fn random_placements(sc: &Scenario, rng: &mut impl Rng) -> Vec<Placement> {
    (0..sc.n_terminals())
        .map(|_| {
            let prefix = rng.gen_range(0..=sc.chain_length);
            Placement::new(
                (0..sc.chain_length)
                    .map(|i| (i < prefix).then(|| rng.gen_range(0..sc.n_satellites())))
                    .collect(),
            )
        })
        .collect()
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}
