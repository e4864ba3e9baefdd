//! Depth-first branch and bound over per-terminal chain placements.
//!
//! Each terminal branches on a placement (a satellite for each of a leading
//! run of chain positions, the data center for the rest); caching follows as
//! the union of used `(NF, satellite)` pairs, and products / XOR / indicator
//! auxiliaries follow from the placement. Per-terminal costs are exact
//! cost-model values, so totals agree with [`crate::cost::total_cost`] bit
//! for bit.
//!
//! Three lower bounds on the undecided terminals, all admissible:
//!
//! * each terminal's cheapest option that still fits the current state on
//!   its own (capacities shared with other terminals relaxed);
//! * a knapsack over remaining compute: every orbit-served position on
//!   satellite `s` takes at least `min_k f_ks`, which caps the number of
//!   orbit-served positions left;
//! * a Lagrangian relaxation pricing compute per satellite and the
//!   "served only where cached" link per `(terminal, NF, satellite)`. It
//!   splits into per-terminal choices and a small cache knapsack per
//!   satellite. Multipliers are tuned by subgradient steps at the root and
//!   held fixed below it; the greedy solutions met along the way seed the
//!   incumbent.
//!
//! The GCO and NFCO decisions are offered as incumbents before the search
//! starts, so a run stopped by its node or time limit still returns a
//! decision no worse than either heuristic.
//!
//! Symmetric alternatives (a position hosted on either of two equidistant
//! neighbors) have equal costs under every bound, so trees grow quickly
//! past a dozen terminals on the default constellation; the node limit is
//! the intended control there.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use serde::{Serialize, Serializer};

use super::model::IlpModel;
use crate::cost::{sum_in_order, terminal_cost, Normalizers};
use crate::error::Result;
use crate::heuristics::{gco, nfco};
use crate::model::{Decision, Placement, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    NodeLimit,
}

/// How to choose among optima of equal cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// The optimum with the lexicographically smallest
    /// [`Decision::canonical_key`]; explores every tied subtree.
    #[default]
    Canonical,
    /// Whichever optimum the search meets first; ties are pruned.
    FirstFound,
}

#[derive(Debug, Clone)]
pub struct SolveLimits {
    pub node_limit: u64,
    pub time_limit: Option<Duration>,
    pub tie_break: TieBreak,
    /// Seed the incumbent with the greedy heuristics' decisions.
    pub warm_start: bool,
}

impl Default for SolveLimits {
    fn default() -> Self {
        Self { node_limit: 50_000_000, time_limit: None, tie_break: TieBreak::Canonical, warm_start: true }
    }
}

fn millis<S: Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1e3)
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Normalized total cost of `decision`.
    pub objective: f64,
    /// The linear objective of the model at the lifted assignment; agrees
    /// with `objective` up to rounding.
    pub model_objective: f64,
    /// Lower bound at the root.
    pub root_bound: f64,
    pub nodes: u64,
    #[serde(rename = "wall_time_ms", serialize_with = "millis")]
    pub wall_time: Duration,
    pub decision: Decision,
}

/// One candidate placement for one terminal.
#[derive(Debug, Clone)]
struct Candidate {
    cost: f64,
    placement: Placement,
    /// `(nf, satellite)` per orbit-served position.
    uses: Vec<(usize, usize)>,
    /// Compute demand per distinct satellite.
    compute: Vec<(usize, f64)>,
}

/// Every placement obeying the prefix rule that fits an empty constellation
/// on its own, sorted by (cost, tie-break key), minus dominated ones.
fn candidates(sc: &Scenario, norms: &Normalizers, u: usize) -> Result<Vec<Candidate>> {
    let n_s = sc.n_satellites();
    let cat = &sc.catalog;
    let chain = sc.chain_of(u);
    let mut out = Vec::new();
    for prefix in 0..=sc.chain_length {
        for mut code in 0..n_s.pow(prefix as u32) {
            let mut hosts = vec![None; sc.chain_length];
            for h in hosts[..prefix].iter_mut().rev() {
                *h = Some(code % n_s);
                code /= n_s;
            }
            let uses: Vec<(usize, usize)> = hosts[..prefix].iter().enumerate().map(|(i, h)| (chain[i], h.unwrap())).collect();
            let mut compute = vec![0.0; n_s];
            let mut storage = vec![0.0; n_s];
            for &(k, s) in &uses {
                compute[s] += cat.f(k, s);
                storage[s] += cat.nf_storage[k];
            }
            let fits = (0..n_s).all(|s| {
                compute[s] <= cat.sat_compute[s] * (1.0 + 1e-9) && storage[s] <= cat.sat_storage[s] * (1.0 + 1e-9)
            });
            if fits {
                let placement = Placement::new(hosts);
                let cost = norms.weigh(sc.alpha, u, &terminal_cost(sc, u, &placement)?);
                let compute = (0..n_s).filter(|&s| compute[s] > 0.0).map(|s| (s, compute[s])).collect();
                out.push(Candidate { cost, placement, uses, compute });
            }
        }
    }
    out.sort_by(|a, b| a.cost.total_cmp(&b.cost).then_with(|| a.placement.key(n_s).cmp(b.placement.key(n_s))));
    Ok(drop_dominated(out))
}

/// Drops candidates beaten by one of their own shorter prefixes: the prefix
/// uses a subset of the resources and costs no more (ties go to the smaller
/// key), so it can replace the longer placement in any feasible solution.
fn drop_dominated(sorted: Vec<Candidate>) -> Vec<Candidate> {
    let rank: HashMap<&Placement, usize> = sorted.iter().enumerate().map(|(r, c)| (&c.placement, r)).collect();
    let keep: Vec<bool> = sorted
        .iter()
        .enumerate()
        .map(|(r, c)| {
            let mut shorter = c.placement.clone();
            // An earlier rank means cheaper, or tied with a smaller key.
            !(0..c.placement.prefix_len()).rev().any(|q| {
                shorter.hosts[q] = None;
                rank.get(&shorter).is_some_and(|&r2| r2 < r)
            })
        })
        .collect();
    sorted.into_iter().zip(keep).filter_map(|(c, k)| k.then_some(c)).collect()
}

/// Remaining capacities and image reference counts along the current path.
#[derive(Debug, Clone)]
struct State {
    compute_left: Vec<f64>,
    storage_left: Vec<f64>,
    cache_refs: Vec<u32>,
}

impl State {
    fn fits(&self, sc: &Scenario, c: &Candidate) -> bool {
        let cat = &sc.catalog;
        let n_s = sc.n_satellites();
        if !c.compute.iter().all(|&(s, need)| need <= self.compute_left[s] + 1e-9 * cat.sat_compute[s]) {
            return false;
        }
        // A chain never repeats an NF, so new images on one satellite are distinct.
        c.uses.iter().enumerate().all(|(i, &(_, s))| {
            if c.uses[..i].iter().any(|&(_, t)| t == s) {
                return true;
            }
            let need: f64 = c.uses[i..]
                .iter()
                .filter(|&&(k, t)| t == s && self.cache_refs[k * n_s + t] == 0)
                .map(|&(k, _)| cat.nf_storage[k])
                .sum();
            need <= self.storage_left[s] + 1e-9 * cat.sat_storage[s]
        })
    }

    fn apply(&mut self, sc: &Scenario, c: &Candidate, add: bool) {
        let cat = &sc.catalog;
        let n_s = sc.n_satellites();
        for &(k, s) in &c.uses {
            let refs = &mut self.cache_refs[k * n_s + s];
            if add {
                self.compute_left[s] -= cat.f(k, s);
                if *refs == 0 {
                    self.storage_left[s] -= cat.nf_storage[k];
                }
                *refs += 1;
            } else {
                self.compute_left[s] += cat.f(k, s);
                *refs -= 1;
                if *refs == 0 {
                    self.storage_left[s] += cat.nf_storage[k];
                }
            }
        }
    }
}

/// Best subset of items `(value, size)` fitting in `room`: total value and
/// membership flags.
fn knapsack(items: &[(f64, f64)], room: f64) -> (f64, Vec<bool>) {
    let mut idx: Vec<usize> = (0..items.len()).collect();
    idx.sort_by(|&a, &b| (items[b].0 / items[b].1).total_cmp(&(items[a].0 / items[a].1)));
    struct Walk<'a> {
        items: &'a [(f64, f64)],
        idx: Vec<usize>,
        taken: Vec<bool>,
        best: (f64, Vec<bool>),
    }
    impl Walk<'_> {
        fn go(&mut self, at: usize, room: f64, acc: f64) {
            if acc > self.best.0 {
                self.best = (acc, self.taken.clone());
            }
            if at == self.idx.len() {
                return;
            }
            // Fractional relaxation of what is left.
            let mut cap = room;
            let mut upper = acc;
            for &i in &self.idx[at..] {
                let (v, w) = self.items[i];
                if w <= cap {
                    cap -= w;
                    upper += v;
                } else {
                    upper += v * cap / w;
                    break;
                }
            }
            if upper <= self.best.0 {
                return;
            }
            let i = self.idx[at];
            let (v, w) = self.items[i];
            if w <= room {
                self.taken[i] = true;
                self.go(at + 1, room - w, acc + v);
                self.taken[i] = false;
            }
            self.go(at + 1, room, acc);
        }
    }
    let n = items.len();
    let mut walk = Walk { items, idx, taken: vec![false; n], best: (0.0, vec![false; n]) };
    walk.go(0, room, 0.0);
    walk.best
}

/// Lagrange multipliers of the relaxation, valid for a subtree.
#[derive(Debug, Clone)]
struct Prices {
    /// Per satellite, per unit of capacity share.
    compute: Vec<f64>,
    /// `link[j][k * |S| + s]`, for the terminal at depth `j`.
    link: Vec<Vec<f64>>,
    /// Suffix sums of `link` over depth.
    suffix: Vec<Vec<f64>>,
    /// Per depth, option indices sorted by priced cost.
    order: Vec<Vec<usize>>,
}

/// Immutable search data.
struct Problem<'a> {
    sc: &'a Scenario,
    order: Vec<usize>,
    options: Vec<Vec<Candidate>>,
    /// `slot_bound[j][p]`: least cost of terminals `order[j..]` using at
    /// most `p` orbit slots in total.
    slot_bound: Vec<Vec<f64>>,
    min_alloc: Vec<f64>,
}

/// The relaxation solved at one node for fixed prices.
struct Relaxed {
    value: f64,
    /// Option index per depth from the node's depth on.
    picks: Vec<usize>,
    cached: Vec<bool>,
}

impl Problem<'_> {
    fn priced(&self, pr: &Prices, j: usize, c: &Candidate) -> f64 {
        let n_s = self.sc.n_satellites();
        let cap = &self.sc.catalog.sat_compute;
        c.cost
            + c.compute.iter().map(|&(s, f)| pr.compute[s] * f / cap[s]).sum::<f64>()
            + c.uses.iter().map(|&(k, s)| pr.link[j][k * n_s + s]).sum::<f64>()
    }

    fn compute_credit(&self, pr: &Prices, state: &State) -> f64 {
        let cap = &self.sc.catalog.sat_compute;
        (0..cap.len()).map(|s| pr.compute[s] * state.compute_left[s].max(0.0) / cap[s]).sum()
    }

    /// Most link credit the cache can still earn for terminals `order[j..]`
    /// and the cache achieving it: images already cached earn theirs for
    /// free, the rest must fit the remaining storage.
    fn cache_choice(&self, pr: &Prices, j: usize, state: &State) -> (f64, Vec<bool>) {
        let n_s = self.sc.n_satellites();
        let cat = &self.sc.catalog;
        let values = &pr.suffix[j];
        let mut total = 0.0;
        let mut cached = vec![false; cat.n_nfs() * n_s];
        for s in 0..n_s {
            let room = state.storage_left[s] * (1.0 + 1e-9);
            let mut items = Vec::new();
            let mut which = Vec::new();
            for k in 0..cat.n_nfs() {
                let v = values[k * n_s + s];
                if state.cache_refs[k * n_s + s] > 0 {
                    cached[k * n_s + s] = true;
                    total += v;
                } else if v > 0.0 && cat.nf_storage[k] <= room {
                    items.push((v, cat.nf_storage[k].max(f64::MIN_POSITIVE)));
                    which.push(k);
                }
            }
            let (value, taken) = knapsack(&items, room);
            total += value;
            for (k, t) in which.into_iter().zip(taken) {
                cached[k * n_s + s] |= t;
            }
        }
        (total, cached)
    }

    /// Lagrangian bound on terminals `order[j..]` from `state`: each takes
    /// its cheapest fitting option at priced cost, and unused compute and
    /// the cache's link credit are paid back.
    fn priced_bound(&self, pr: &Prices, j: usize, state: &State) -> f64 {
        let mut total = -self.compute_credit(pr, state);
        for jj in j..self.order.len() {
            let opts = &self.options[jj];
            match pr.order[jj].iter().map(|&o| &opts[o]).find(|c| state.fits(self.sc, c)) {
                Some(c) => total += self.priced(pr, jj, c),
                None => return f64::INFINITY,
            }
        }
        total - self.cache_choice(pr, j, state).0
    }

    fn relax(&self, pr: &Prices, j: usize, state: &State) -> Relaxed {
        let mut value = -self.compute_credit(pr, state);
        let picks = (j..self.order.len())
            .map(|jj| {
                let opts = &self.options[jj];
                let (o, v) = (0..opts.len())
                    .filter(|&o| state.fits(self.sc, &opts[o]))
                    .map(|o| (o, self.priced(pr, jj, &opts[o])))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .expect("the data-center option always fits");
                value += v;
                o
            })
            .collect();
        let (credit, cached) = self.cache_choice(pr, j, state);
        Relaxed { value: value - credit, picks, cached }
    }

    fn sort_options(&self, pr: &mut Prices, j: usize) {
        for jj in j..self.order.len() {
            let opts = &self.options[jj];
            let keys: Vec<f64> = opts.iter().map(|c| self.priced(pr, jj, c)).collect();
            let mut idx: Vec<usize> = (0..opts.len()).collect();
            idx.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]).then(a.cmp(&b)));
            pr.order[jj] = idx;
        }
    }

    fn fitting_bound(&self, j: usize, state: &State) -> f64 {
        let mut total = 0.0;
        for opts in &self.options[j..] {
            match opts.iter().find(|c| state.fits(self.sc, c)) {
                Some(c) => total += c.cost,
                None => return f64::INFINITY,
            }
        }
        total
    }

    fn slots(&self, state: &State) -> usize {
        state
            .compute_left
            .iter()
            .zip(&self.min_alloc)
            .map(|(&c, &f)| ((c / f) * (1.0 + 1e-12)).floor().max(0.0) as usize)
            .sum()
    }

    fn slot_bound_at(&self, j: usize, slots: usize) -> f64 {
        let row = &self.slot_bound[j];
        row[slots.min(row.len() - 1)]
    }

    /// Canonical key of a full assignment given option indices by depth.
    fn key_of(&self, by_depth: &[usize]) -> Vec<usize> {
        let n_s = self.sc.n_satellites();
        let mut depth_of = vec![0usize; self.order.len()];
        for (j, &u) in self.order.iter().enumerate() {
            depth_of[u] = j;
        }
        depth_of.iter().flat_map(|&j| self.options[j][by_depth[j]].placement.key(n_s)).collect()
    }

    fn total_of(&self, by_depth: &[usize]) -> f64 {
        let mut costs = vec![0.0; self.order.len()];
        for (j, &u) in self.order.iter().enumerate() {
            costs[u] = self.options[j][by_depth[j]].cost;
        }
        sum_in_order(&costs)
    }
}

const REL_EPS: f64 = 1e-12;

/// Subgradient schedule: rounds, initial step, rounds without progress
/// before the step halves.
#[derive(Debug, Clone, Copy)]
struct Schedule {
    rounds: usize,
    step: f64,
    patience: usize,
    /// Run a priced greedy completion every this many rounds.
    dive_every: usize,
}

const ROOT_SCHEDULE: Schedule = Schedule { rounds: 1000, step: 2.0, patience: 20, dive_every: 10 };

struct Search<'a> {
    problem: Problem<'a>,
    state: State,
    chosen: Vec<usize>,
    /// (total, option index by depth, canonical key)
    best: Option<(f64, Vec<usize>, Vec<usize>)>,
    tie_break: TieBreak,
    nodes: u64,
    node_limit: u64,
    deadline: Option<Instant>,
    aborted: bool,
}

impl Search<'_> {
    fn prunes(&self, lower: f64) -> bool {
        let Some((best, _, _)) = &self.best else { return false };
        let lower = lower - REL_EPS * lower.abs();
        match self.tie_break {
            TieBreak::Canonical => lower > *best,
            TieBreak::FirstFound => lower >= *best - REL_EPS * best.abs(),
        }
    }

    fn offer(&mut self, by_depth: &[usize]) {
        let total = self.problem.total_of(by_depth);
        let better = match &self.best {
            None => true,
            Some((best, _, key)) => {
                total < *best
                    || (total == *best && self.tie_break == TieBreak::Canonical && self.problem.key_of(by_depth) < *key)
            }
        };
        if better {
            self.best = Some((total, by_depth.to_vec(), self.problem.key_of(by_depth)));
        }
    }

    /// Offers a complete decision. Each terminal's placement is mapped to
    /// the option for it or, if that one was dropped as dominated, for its
    /// cheapest listed prefix. Decisions that do not fit are ignored.
    fn offer_decision(&mut self, d: &Decision) {
        let p = &self.problem;
        let mut state = self.state.clone();
        let mut picks = Vec::with_capacity(p.order.len());
        for (j, &u) in p.order.iter().enumerate() {
            let Ok(mut placement) = d.placement(p.sc, u) else { return };
            let mut pick = None;
            for q in (0..=placement.prefix_len()).rev() {
                placement.hosts[q..].iter_mut().for_each(|h| *h = None);
                if let Some(o) = p.options[j].iter().position(|c| c.placement == placement) {
                    if pick.map_or(true, |b: usize| p.options[j][o].cost < p.options[j][b].cost) {
                        pick = Some(o);
                    }
                }
            }
            let Some(o) = pick else { return };
            if !state.fits(p.sc, &p.options[j][o]) {
                return;
            }
            state.apply(p.sc, &p.options[j][o], true);
            picks.push(o);
        }
        self.offer(&picks);
    }

    /// Completes the current path greedily, each terminal taking its
    /// cheapest fitting option at priced cost, and offers the result.
    fn priced_dive(&mut self, pr: &Prices, j: usize) {
        let p = &self.problem;
        let mut state = self.state.clone();
        let mut picks = self.chosen[..j].to_vec();
        for jj in j..p.order.len() {
            let opts = &p.options[jj];
            let pick = pr.order[jj]
                .iter()
                .copied()
                .find(|&o| state.fits(p.sc, &opts[o]))
                .expect("the data-center option always fits");
            state.apply(p.sc, &opts[pick], true);
            picks.push(pick);
        }
        self.offer(&picks);
    }

    /// Subgradient ascent on the relaxation of the subtree below depth `j`
    /// (path cost `acc`). Leaves the best prices found in `pr` and returns
    /// their bound on the remaining cost.
    fn tune(&mut self, pr: &mut Prices, j: usize, acc: f64, plan: Schedule) -> f64 {
        let n_s = self.problem.sc.n_satellites();
        let width = self.problem.sc.n_nfs() * n_s;
        let n_u = self.problem.order.len();
        let mut best = (f64::NEG_INFINITY, pr.clone());
        let mut step = plan.step;
        let mut stall = 0;
        for round in 0..plan.rounds {
            pr.suffix = suffix_sums(&pr.link, width);
            let relaxed = self.problem.relax(pr, j, &self.state);
            if round % plan.dive_every == 0 {
                self.problem.sort_options(pr, j);
                self.priced_dive(pr, j);
            }
            if relaxed.value > best.0 + 1e-12 * relaxed.value.abs() {
                best = (relaxed.value, pr.clone());
                stall = 0;
            } else {
                stall += 1;
                if stall == plan.patience {
                    step *= 0.5;
                    stall = 0;
                }
            }
            let target = self.best.as_ref().map_or(n_u as f64, |b| b.0) - acc;
            if self.prunes(acc + best.0) || step < 1e-6 {
                break;
            }

            let cat = &self.problem.sc.catalog;
            let mut g_compute: Vec<f64> = (0..n_s).map(|s| -self.state.compute_left[s].max(0.0) / cat.sat_compute[s]).collect();
            let mut served = vec![vec![false; width]; n_u - j];
            for (i, &o) in relaxed.picks.iter().enumerate() {
                let c = &self.problem.options[j + i][o];
                for &(s, f) in &c.compute {
                    g_compute[s] += f / cat.sat_compute[s];
                }
                for &(k, s) in &c.uses {
                    served[i][k * n_s + s] = true;
                }
            }
            let mut norm: f64 = g_compute.iter().map(|g| g * g).sum();
            for row in &served {
                norm += row.iter().zip(&relaxed.cached).filter(|(y, x)| y != x).count() as f64;
            }
            if norm == 0.0 {
                break;
            }
            let t = step * (target - relaxed.value).max(1e-6 * target.abs().max(1.0)) / norm;
            for (price, g) in pr.compute.iter_mut().zip(&g_compute) {
                *price = (*price + t * g).max(0.0);
            }
            for (prices, row) in pr.link[j..].iter_mut().zip(&served) {
                for (i, price) in prices.iter_mut().enumerate() {
                    let g = f64::from(u8::from(row[i])) - f64::from(u8::from(relaxed.cached[i]));
                    *price = (*price + t * g).max(0.0);
                }
            }
        }
        *pr = best.1;
        pr.suffix = suffix_sums(&pr.link, width);
        self.problem.sort_options(pr, j);
        best.0
    }

    fn dfs(&mut self, j: usize, acc: f64, pr: &Prices) {
        if j == self.problem.order.len() {
            let chosen = self.chosen.clone();
            self.offer(&chosen);
            return;
        }
        let slots_now = self.problem.slots(&self.state);
        for o in 0..self.problem.options[j].len() {
            let cost = self.problem.options[j][o].cost;
            // Later options cost at least as much and the slot bound only shrinks.
            if self.prunes(acc + cost + self.problem.slot_bound_at(j + 1, slots_now)) {
                break;
            }
            if !self.state.fits(self.problem.sc, &self.problem.options[j][o]) {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.node_limit || self.deadline.is_some_and(|d| self.nodes.is_multiple_of(1024) && Instant::now() > d) {
                self.aborted = true;
                return;
            }
            self.state.apply(self.problem.sc, &self.problem.options[j][o], true);
            self.chosen[j] = o;
            let here = acc + cost;
            let p = &self.problem;
            let expand = !self.prunes(here + p.slot_bound_at(j + 1, p.slots(&self.state)))
                && !self.prunes(here + p.fitting_bound(j + 1, &self.state))
                && !self.prunes(here + p.priced_bound(pr, j + 1, &self.state));
            if expand {
                self.dfs(j + 1, here, pr);
            }
            self.state.apply(self.problem.sc, &self.problem.options[j][o], false);
            if self.aborted {
                return;
            }
        }
    }
}

fn suffix_sums(rows: &[Vec<f64>], width: usize) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; width]; rows.len() + 1];
    for j in (0..rows.len()).rev() {
        for i in 0..width {
            out[j][i] = out[j + 1][i] + rows[j][i];
        }
    }
    out
}

/// Solves the program exactly for `sc`. `model` must have been built from
/// the same scenario; it is used to score the returned assignment.
pub fn solve_exact(sc: &Scenario, model: &IlpModel, limits: &SolveLimits) -> Result<SolveResult> {
    let start = Instant::now();
    let norms = Normalizers::dco(sc)?;
    let n_u = sc.n_terminals();
    let n_s = sc.n_satellites();
    let n_k = sc.n_nfs();

    // Largest total input first; ties by index.
    let mut order: Vec<usize> = (0..n_u).collect();
    order.sort_by(|&a, &b| sc.total_input(b).total_cmp(&sc.total_input(a)).then(a.cmp(&b)));
    let options = order.iter().map(|&u| candidates(sc, &norms, u)).collect::<Result<Vec<_>>>()?;
    let min_alloc: Vec<f64> = (0..n_s).map(|s| (0..n_k).map(|k| sc.catalog.f(k, s)).fold(f64::INFINITY, f64::min)).collect();
    let state = State {
        compute_left: sc.catalog.sat_compute.clone(),
        storage_left: sc.catalog.sat_storage.clone(),
        cache_refs: vec![0; n_k * n_s],
    };

    let mut problem = Problem {
        sc,
        order,
        options,
        slot_bound: Vec::new(),
        min_alloc,
    };
    let max_slots = problem.slots(&state);
    let mut slot_bound = vec![vec![0.0; max_slots + 1]; n_u + 1];
    for j in (0..n_u).rev() {
        let mut by_len = vec![f64::INFINITY; sc.chain_length + 1];
        for c in &problem.options[j] {
            by_len[c.uses.len()] = by_len[c.uses.len()].min(c.cost);
        }
        for p in 0..=max_slots {
            slot_bound[j][p] =
                (0..=p.min(sc.chain_length)).map(|q| by_len[q] + slot_bound[j + 1][p - q]).fold(f64::INFINITY, f64::min);
        }
    }
    problem.slot_bound = slot_bound;

    let mut search = Search {
        problem,
        state,
        chosen: vec![0; n_u],
        best: None,
        tie_break: limits.tie_break,
        nodes: 0,
        node_limit: limits.node_limit,
        deadline: limits.time_limit.map(|t| start + t),
        aborted: false,
    };
    let mut prices = Prices {
        compute: vec![0.0; n_s],
        link: vec![vec![0.0; n_k * n_s]; n_u],
        suffix: vec![vec![0.0; n_k * n_s]; n_u + 1],
        order: vec![Vec::new(); n_u],
    };
    if limits.warm_start {
        search.offer_decision(&gco(sc));
        search.offer_decision(&nfco(sc));
    }
    let mut root_bound = search.problem.slot_bound_at(0, max_slots).max(search.problem.fitting_bound(0, &search.state));
    if n_u > 0 {
        root_bound = root_bound.max(search.tune(&mut prices, 0, 0.0, ROOT_SCHEDULE));
    }

    search.dfs(0, 0.0, &prices);

    let status = match (&search.best, search.aborted) {
        (Some(_), false) => SolveStatus::Optimal,
        (_, true) => SolveStatus::NodeLimit,
        (None, false) => SolveStatus::Infeasible,
    };
    let placements: Vec<Placement> = match &search.best {
        Some((_, by_depth, _)) => {
            let mut out = vec![Placement::data_center(sc.chain_length); n_u];
            for (j, &u) in search.problem.order.iter().enumerate() {
                out[u] = search.problem.options[j][by_depth[j]].placement.clone();
            }
            out
        }
        None => vec![Placement::data_center(sc.chain_length); n_u],
    };
    let decision = Decision::from_placements(sc, &placements);
    let objective = crate::cost::total_cost(sc, &decision, &norms)?;
    let model_objective = model.objective_value(&model.assignment(sc, &decision));
    Ok(SolveResult {
        status,
        objective,
        model_objective,
        root_bound,
        nodes: search.nodes,
        wall_time: start.elapsed(),
        decision,
    })
}
