use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::cost::Normalizers;
use crate::error::Result;
use crate::model::{Decision, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum VarKind {
    /// `x[k][s]`: NF `k` cached on satellite `s`.
    X,
    /// `y[u][k][s]`: terminal `u`'s NF `k` served by satellite `s`.
    Y,
    /// `z[u][k][s][k'][s']`: product `y[u][k][s] * y[u][k'][s']`.
    Z,
    /// `theta[u][i]`: data-center transition between positions `i` and `i + 1`.
    Theta,
    /// `pi[u]`: some position of `u`'s chain runs in the data center.
    Pi,
}

impl VarKind {
    fn prefix(self) -> &'static str {
        match self {
            VarKind::X => "x",
            VarKind::Y => "y",
            VarKind::Z => "z",
            VarKind::Theta => "theta",
            VarKind::Pi => "pi",
        }
    }

    fn arity(self) -> usize {
        match self {
            VarKind::X => 2,
            VarKind::Y => 3,
            VarKind::Z => 5,
            VarKind::Theta => 2,
            VarKind::Pi => 1,
        }
    }
}

/// A binary variable. The name encodes kind and index, e.g. `y_3_1_7`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub index: Vec<usize>,
}

impl Variable {
    pub fn new(kind: VarKind, index: Vec<usize>) -> Self {
        let mut name = kind.prefix().to_string();
        for i in &index {
            name.push('_');
            name.push_str(&i.to_string());
        }
        Self { name, kind, index }
    }

    /// Inverse of the naming scheme; `None` for foreign names.
    pub fn from_name(name: &str) -> Option<Self> {
        let mut parts = name.split('_');
        let kind = match parts.next()? {
            "x" => VarKind::X,
            "y" => VarKind::Y,
            "z" => VarKind::Z,
            "theta" => VarKind::Theta,
            "pi" => VarKind::Pi,
            _ => return None,
        };
        let index = parts.map(|p| p.parse().ok()).collect::<Option<Vec<usize>>>()?;
        (index.len() == kind.arity()).then(|| Self::new(kind, index))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

/// Constraint families C1–C13.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Family(pub u8);

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{}", self.0)
    }
}

/// `sum(coef * var) sense rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Constraint {
    pub name: String,
    pub family: Family,
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(family: u8, index: &[usize], terms: Vec<(usize, f64)>, sense: Sense, rhs: f64) -> Self {
        let mut name = format!("C{family}");
        for i in index {
            name.push('_');
            name.push_str(&i.to_string());
        }
        Self { name, family: Family(family), terms, sense, rhs }
    }

    pub fn lhs(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, c)| c * values[v]).sum()
    }

    pub fn is_satisfied(&self, values: &[f64], tol: f64) -> bool {
        let lhs = self.lhs(values);
        let slack = tol * (1.0 + self.rhs.abs());
        match self.sense {
            Sense::Le => lhs <= self.rhs + slack,
            Sense::Ge => lhs >= self.rhs - slack,
            Sense::Eq => (lhs - self.rhs).abs() <= slack,
        }
    }
}

/// `z <= y1`, `z <= y2`, `z >= y1 + y2 - 1`: pins `z = y1 * y2` on binaries.
pub fn product_gadget(index: &[usize], z: usize, y1: usize, y2: usize) -> [Constraint; 3] {
    [
        Constraint::new(6, index, vec![(z, 1.0), (y1, -1.0)], Sense::Le, 0.0),
        Constraint::new(7, index, vec![(z, 1.0), (y2, -1.0)], Sense::Le, 0.0),
        Constraint::new(8, index, vec![(z, 1.0), (y1, -1.0), (y2, -1.0)], Sense::Ge, -1.0),
    ]
}

/// Pins `theta = g1 XOR g2` where `g1`, `g2` are sums of binaries known to
/// be 0 or 1. (`(1 - g1) XOR (1 - g2)` is the same value.)
pub fn xor_gadget(index: &[usize], theta: usize, g1: &[usize], g2: &[usize]) -> [Constraint; 4] {
    let expr = |theta_coef: f64, c1: f64, c2: f64| {
        let mut t = vec![(theta, theta_coef)];
        t.extend(g1.iter().map(|&v| (v, c1)));
        t.extend(g2.iter().map(|&v| (v, c2)));
        t
    };
    [
        Constraint::new(9, index, expr(1.0, -1.0, 1.0), Sense::Ge, 0.0),
        Constraint::new(10, index, expr(1.0, 1.0, -1.0), Sense::Ge, 0.0),
        Constraint::new(11, index, expr(1.0, 1.0, 1.0), Sense::Le, 2.0),
        Constraint::new(12, index, expr(1.0, -1.0, -1.0), Sense::Le, 0.0),
    ]
}

/// Forces `pi = 1` whenever any of the `positions` chain slots is not served
/// in orbit. Slot `i` is served when the sum of its `y` variables is 1, so
/// the ground count is `positions.len() - sum(y)` and the constraint
/// `count <= len * pi` is rearranged to `sum(y) + len * pi >= len`.
pub fn indicator_gadget(index: &[usize], pi: usize, positions: &[Vec<usize>]) -> Constraint {
    let len = positions.len() as f64;
    let mut terms: Vec<(usize, f64)> = positions.iter().flatten().map(|&v| (v, 1.0)).collect();
    terms.push((pi, len));
    Constraint::new(13, index, terms, Sense::Ge, len)
}

/// The linearized program: binaries, linear constraints grouped by family,
/// and a linear objective (plus constant) equal to the normalized cost.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IlpModel {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objective: Vec<(usize, f64)>,
    pub objective_constant: f64,
    #[serde(skip)]
    lookup: HashMap<String, usize>,
}

impl IlpModel {
    pub fn new(
        variables: Vec<Variable>,
        constraints: Vec<Constraint>,
        objective: Vec<(usize, f64)>,
        objective_constant: f64,
    ) -> Self {
        let lookup = variables.iter().enumerate().map(|(i, v)| (v.name.clone(), i)).collect();
        Self { variables, constraints, objective, objective_constant, lookup }
    }

    pub fn var(&self, name: &str) -> Option<usize> {
        self.lookup.get(name).copied()
    }

    pub fn var_of(&self, kind: VarKind, index: &[usize]) -> Option<usize> {
        self.var(&Variable::new(kind, index.to_vec()).name)
    }

    pub fn count(&self, kind: VarKind) -> usize {
        self.variables.iter().filter(|v| v.kind == kind).count()
    }

    pub fn family_count(&self, family: u8) -> usize {
        self.constraints.iter().filter(|c| c.family == Family(family)).count()
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective_constant + self.objective.iter().map(|&(v, c)| c * values[v]).sum::<f64>()
    }

    pub fn violated(&self, values: &[f64]) -> Vec<&Constraint> {
        self.constraints.iter().filter(|c| !c.is_satisfied(values, 1e-9)).collect()
    }

    /// Lifts `(X, Y)` to a full assignment: `z` as products, `theta` as the
    /// XOR of consecutive served indicators, `pi` as the any-ground indicator.
    pub fn assignment(&self, sc: &Scenario, d: &Decision) -> Vec<f64> {
        let bit = |b: bool| if b { 1.0 } else { 0.0 };
        let served = |u: usize, i: usize| d.hosts(u, sc.nf_at(u, i)).count();
        self.variables
            .iter()
            .map(|v| match (v.kind, v.index.as_slice()) {
                (VarKind::X, &[k, s]) => bit(d.x(k, s)),
                (VarKind::Y, &[u, k, s]) => bit(d.y(u, k, s)),
                (VarKind::Z, &[u, k, s, k2, s2]) => bit(d.y(u, k, s) && d.y(u, k2, s2)),
                (VarKind::Theta, &[u, i]) => bit((served(u, i) > 0) != (served(u, i + 1) > 0)),
                (VarKind::Pi, &[u]) => bit((0..sc.chain_length).any(|i| served(u, i) == 0)),
                _ => unreachable!("malformed variable {}", v.name),
            })
            .collect()
    }
}

/// Builds the program with per-terminal data-center normalizers.
pub fn build_model(sc: &Scenario) -> Result<IlpModel> {
    build_model_with(sc, &Normalizers::dco(sc)?)
}

pub fn build_model_with(sc: &Scenario, norms: &Normalizers) -> Result<IlpModel> {
    let (n_k, n_s, n_u, len) = (sc.n_nfs(), sc.n_satellites(), sc.n_terminals(), sc.chain_length);
    let cat = &sc.catalog;
    let link = &sc.topology.link;

    let mut vars = Vec::new();
    let mut add = |kind: VarKind, index: Vec<usize>| {
        vars.push(Variable::new(kind, index));
        vars.len() - 1
    };
    let x: Vec<Vec<usize>> = (0..n_k).map(|k| (0..n_s).map(|s| add(VarKind::X, vec![k, s])).collect()).collect();
    let y: Vec<Vec<Vec<usize>>> = (0..n_u)
        .map(|u| (0..n_k).map(|k| (0..n_s).map(|s| add(VarKind::Y, vec![u, k, s])).collect()).collect())
        .collect();
    // Products only for NF pairs adjacent in the terminal's own chain.
    let mut z: Vec<Vec<Vec<Vec<usize>>>> = Vec::with_capacity(n_u);
    for u in 0..n_u {
        let chain = sc.chain_of(u);
        z.push(
            (0..len.saturating_sub(1))
                .map(|i| {
                    let (k, k2) = (chain[i], chain[i + 1]);
                    (0..n_s)
                        .map(|s| (0..n_s).map(|s2| add(VarKind::Z, vec![u, k, s, k2, s2])).collect())
                        .collect()
                })
                .collect(),
        );
    }
    let theta: Vec<Vec<usize>> =
        (0..n_u).map(|u| (0..len.saturating_sub(1)).map(|i| add(VarKind::Theta, vec![u, i])).collect()).collect();
    let pi: Vec<usize> = (0..n_u).map(|u| add(VarKind::Pi, vec![u])).collect();

    let mut cons = Vec::new();
    for s in 0..n_s {
        let terms = (0..n_u).flat_map(|u| (0..n_k).map(move |k| (u, k))).map(|(u, k)| (y[u][k][s], cat.f(k, s))).collect();
        cons.push(Constraint::new(1, &[s], terms, Sense::Le, cat.sat_compute[s]));
    }
    for s in 0..n_s {
        let terms = (0..n_k).map(|k| (x[k][s], cat.nf_storage[k])).collect();
        cons.push(Constraint::new(2, &[s], terms, Sense::Le, cat.sat_storage[s]));
    }
    for u in 0..n_u {
        for k in 0..n_k {
            for s in 0..n_s {
                cons.push(Constraint::new(3, &[u, k, s], vec![(y[u][k][s], 1.0), (x[k][s], -1.0)], Sense::Le, 0.0));
            }
        }
    }
    for u in 0..n_u {
        for k in 0..n_k {
            cons.push(Constraint::new(4, &[u, k], (0..n_s).map(|s| (y[u][k][s], 1.0)).collect(), Sense::Le, 1.0));
        }
    }
    // g_i(u) is the sum of y over satellites for the NF at position i.
    let g = |u: usize, i: usize| -> Vec<usize> { y[u][sc.nf_at(u, i)].clone() };
    for u in 0..n_u {
        for i in 0..len.saturating_sub(1) {
            let mut terms: Vec<(usize, f64)> = g(u, i).into_iter().map(|v| (v, 1.0)).collect();
            terms.extend(g(u, i + 1).into_iter().map(|v| (v, -1.0)));
            cons.push(Constraint::new(5, &[u, i], terms, Sense::Ge, 0.0));
        }
    }
    for u in 0..n_u {
        let chain = sc.chain_of(u);
        for i in 0..len.saturating_sub(1) {
            let (k, k2) = (chain[i], chain[i + 1]);
            for s in 0..n_s {
                for s2 in 0..n_s {
                    cons.extend(product_gadget(&[u, k, s, k2, s2], z[u][i][s][s2], y[u][k][s], y[u][k2][s2]));
                }
            }
        }
    }
    let mut xor_rows = Vec::new();
    for u in 0..n_u {
        for i in 0..len.saturating_sub(1) {
            xor_rows.push(xor_gadget(&[u, i], theta[u][i], &g(u, i), &g(u, i + 1)));
        }
    }
    // Keep families contiguous: all C9, then C10, C11, C12.
    for f in 0..4 {
        cons.extend(xor_rows.iter().map(|rows| rows[f].clone()));
    }
    for u in 0..n_u {
        let positions: Vec<Vec<usize>> = (0..len).map(|i| g(u, i)).collect();
        cons.push(indicator_gadget(&[u], pi[u], &positions));
    }

    // Objective: per-terminal latency and energy, each weighted by the
    // tradeoff weight over its normalizer.
    let mut obj: BTreeMap<usize, f64> = BTreeMap::new();
    let mut constant = 0.0;
    let mut put = |v: usize, c: f64| *obj.entry(v).or_insert(0.0) += c;
    let c_light = link.light_speed;
    for u in 0..n_u {
        let wt = sc.alpha / norms.latency[u];
        let we = (1.0 - sc.alpha) / norms.energy[u];
        let chain = sc.chain_of(u);
        let access = sc.access_satellite(u);
        let l = |i: usize| sc.input(u, i);
        let (first, last) = (chain[0], chain[len - 1]);

        let uplink_tx = l(0) / link.r_u;
        constant += wt * (uplink_tx + 2.0 * link.d_u / c_light) + we * link.p_u_w * uplink_tx;

        for s in 0..n_s {
            let h = sc.hops(access, s);
            // Reaching the first host from the access satellite.
            put(y[u][first][s], (wt + we * link.p_s_w) * l(0) * h / link.r_s + wt * h * link.d_s / c_light);
            // Returning from the last host.
            put(y[u][last][s], wt * h * link.d_s / c_light);
        }
        for i in 0..len - 1 {
            for s in 0..n_s {
                for s2 in 0..n_s {
                    let h = sc.hops(s, s2);
                    let c = (wt + we * link.p_s_w) * l(i + 1) * h / link.r_s + wt * h * link.d_s / c_light;
                    put(z[u][i][s][s2], c);
                }
            }
        }
        for (i, &k) in chain.iter().enumerate() {
            let cycles = cat.cycles_per_bit[k] * l(i);
            for s in 0..n_s {
                let f = cat.f(k, s);
                put(y[u][k][s], wt * cycles / f + we * cat.kappa * cycles * f * f);
            }
            // Data-center compute, charged as cycles / f_g * (1 - sum_s y).
            let dc = wt * cycles / cat.dc_allocation;
            constant += dc;
            for s in 0..n_s {
                put(y[u][k][s], -dc);
            }
        }
        // Whole-chain downlink when the first NF is not served in orbit.
        let down = (wt + we * link.p_g_w) * l(0) / link.r_g;
        constant += down;
        for s in 0..n_s {
            put(y[u][first][s], -down);
        }
        for i in 0..len - 1 {
            put(theta[u][i], (wt + we * link.p_g_w) * l(i + 1) / link.r_g);
        }
        put(pi[u], wt * 2.0 * link.d_g / c_light);
    }
    let objective = obj.into_iter().filter(|&(_, c)| c != 0.0).collect();
    Ok(IlpModel::new(vars, cons, objective, constant))
}
