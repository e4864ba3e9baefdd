//! Exhaustive search over every prefix-respecting placement combination.
//! Slow by construction; used to check the exact solver on tiny instances.

use std::time::Instant;

use super::bnb::{SolveResult, SolveStatus};
use crate::cost::{check_feasibility, total_cost, Normalizers};
use crate::error::{Error, Result};
use crate::ilp::model::IlpModel;
use crate::model::{Decision, Placement, Scenario};

/// Largest search space the oracle will enumerate.
pub const ORACLE_LIMIT: f64 = 1.0e7;

fn placements_for(sc: &Scenario) -> Vec<Placement> {
    let n_s = sc.n_satellites();
    let len = sc.chain_length;
    let mut out = Vec::new();
    for prefix in 0..=len {
        let combos = n_s.pow(prefix as u32);
        for mut code in 0..combos {
            let mut hosts = vec![None; len];
            for h in hosts.iter_mut().take(prefix).rev() {
                *h = Some(code % n_s);
                code /= n_s;
            }
            out.push(Placement::new(hosts));
        }
    }
    out
}

/// True optimum by enumeration. Candidates are scored with the cost model
/// and filtered with the feasibility checker; ties go to the smallest
/// canonical key.
pub fn brute_force_oracle(sc: &Scenario) -> Result<SolveResult> {
    let start = Instant::now();
    let per_terminal = placements_for(sc);
    let size = (per_terminal.len() as f64).powi(sc.n_terminals() as i32);
    if size > ORACLE_LIMIT {
        return Err(Error::TooLarge { size, limit: ORACLE_LIMIT });
    }
    let norms = Normalizers::dco(sc)?;
    let n_u = sc.n_terminals();
    let mut pick = vec![0usize; n_u];
    let mut best: Option<(f64, Vec<usize>, Decision)> = None;
    let mut visited = 0u64;
    loop {
        visited += 1;
        let placements: Vec<Placement> = pick.iter().map(|&i| per_terminal[i].clone()).collect();
        let d = Decision::from_placements(sc, &placements);
        if check_feasibility(sc, &d)?.is_feasible() {
            let cost = total_cost(sc, &d, &norms)?;
            let key = d.canonical_key(sc);
            let better = match &best {
                None => true,
                Some((c, k, _)) => cost < *c || (cost == *c && key < *k),
            };
            if better {
                best = Some((cost, key, d));
            }
        }
        // Odometer over terminals.
        let mut u = 0;
        while u < n_u {
            pick[u] += 1;
            if pick[u] < per_terminal.len() {
                break;
            }
            pick[u] = 0;
            u += 1;
        }
        if u == n_u {
            break;
        }
    }
    let (objective, _, decision) = best.expect("the all-ground decision is always feasible");
    let model = crate::ilp::build_model_with(sc, &norms)?;
    let model_objective = IlpModel::objective_value(&model, &model.assignment(sc, &decision));
    Ok(SolveResult {
        status: SolveStatus::Optimal,
        objective,
        model_objective,
        root_bound: objective,
        nodes: visited,
        wall_time: start.elapsed(),
        decision,
    })
}
