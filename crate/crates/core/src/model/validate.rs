use std::fmt;

use serde::Serialize;

use super::types::Scenario;

/// One broken scenario invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScenarioViolation {
    pub entity: String,
    pub rule: String,
}

impl fmt::Display for ScenarioViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.entity, self.rule)
    }
}

struct Collector(Vec<ScenarioViolation>);

impl Collector {
    fn push(&mut self, entity: impl Into<String>, rule: impl Into<String>) {
        self.0.push(ScenarioViolation { entity: entity.into(), rule: rule.into() });
    }

    fn positive(&mut self, entity: impl Into<String>, v: f64) {
        if !(v > 0.0 && v.is_finite()) {
            self.push(entity, format!("must be positive, got {v}"));
        }
    }
}

/// Checks every scenario invariant. Total: never fails, returns an empty
/// list for a well-formed scenario.
pub fn validate_scenario(sc: &Scenario) -> Vec<ScenarioViolation> {
    let mut out = Collector(Vec::new());
    check_topology(sc, &mut out);
    check_catalog(sc, &mut out);

    let n_nfs = sc.catalog.n_nfs();
    if sc.chain_length == 0 {
        out.push("scenario", "chain length must be at least 1");
    }
    for (j, chain) in sc.chains.iter().enumerate() {
        let entity = format!("chain {j}");
        if chain.nfs.len() != sc.chain_length {
            out.push(&entity, format!("length {} differs from chain length {}", chain.nfs.len(), sc.chain_length));
        }
        for (i, &k) in chain.nfs.iter().enumerate() {
            if k >= n_nfs {
                out.push(&entity, format!("unknown NF {k}"));
            } else if chain.nfs[..i].contains(&k) {
                out.push(&entity, format!("duplicate NF in chain (NF {k})"));
            }
        }
    }

    let n_sats = sc.topology.n_satellites;
    for (u, t) in sc.terminals.iter().enumerate() {
        let entity = format!("terminal {u}");
        match t.associated.len() {
            0 => out.push(&entity, "no association"),
            1 => {}
            _ => out.push(&entity, "multiple associations"),
        }
        if let Some(&s) = t.associated.iter().find(|&&s| s >= n_sats) {
            out.push(&entity, format!("associated with unknown satellite {s}"));
        }
        match t.requested.len() {
            0 => out.push(&entity, "no service request"),
            1 => {}
            _ => out.push(&entity, "multiple service requests"),
        }
        if let Some(&j) = t.requested.iter().find(|&&j| j >= sc.chains.len()) {
            out.push(&entity, format!("requests unknown service {j}"));
        }
        if t.input_sizes.len() != sc.chain_length {
            out.push(&entity, format!("{} input sizes for chain length {}", t.input_sizes.len(), sc.chain_length));
        }
        for (i, &l) in t.input_sizes.iter().enumerate() {
            if !(l > 0.0 && l.is_finite()) {
                out.push(&entity, format!("input size at position {i} must be positive, got {l}"));
            }
        }
    }

    if !(0.0..=1.0).contains(&sc.alpha) {
        out.push("scenario", format!("alpha {} outside [0, 1]", sc.alpha));
    }
    out.0
}

fn check_topology(sc: &Scenario, out: &mut Collector) {
    let t = &sc.topology;
    let n = t.n_satellites;
    if n == 0 {
        out.push("topology", "no satellites");
    }
    if t.hops.len() != n || t.hops.iter().any(|row| row.len() != n) {
        out.push("topology", format!("hop matrix is not {n}x{n}"));
        return;
    }
    for a in 0..n {
        if t.hops[a][a] != 0 {
            out.push(format!("satellite {a}"), "nonzero self hop count");
        }
        for b in 0..n {
            let h = t.hops[a][b];
            if h != t.hops[b][a] {
                out.push(format!("hops ({a}, {b})"), "hop matrix is not symmetric");
            }
            if a != b && h == 0 {
                out.push(format!("hops ({a}, {b})"), "distinct satellites at zero hops");
            }
            if h == u32::MAX {
                out.push(format!("hops ({a}, {b})"), "graph is disconnected");
                continue;
            }
            for c in 0..n {
                let via = t.hops[a][c].saturating_add(t.hops[c][b]);
                if h > via {
                    out.push(format!("hops ({a}, {b})"), format!("triangle inequality fails via {c}"));
                }
            }
        }
    }
    for &[a, b] in &t.links {
        if a >= n || b >= n {
            out.push(format!("link ({a}, {b})"), "references a missing satellite");
        } else if t.hops[a][b] != 1 {
            out.push(format!("link ({a}, {b})"), "linked satellites must be one hop apart");
        }
    }
    let l = &t.link;
    for (name, v) in [
        ("d_u", l.d_u),
        ("d_s", l.d_s),
        ("d_g", l.d_g),
        ("r_u", l.r_u),
        ("r_s", l.r_s),
        ("r_g", l.r_g),
        ("p_u_w", l.p_u_w),
        ("p_s_w", l.p_s_w),
        ("p_g_w", l.p_g_w),
        ("light_speed", l.light_speed),
    ] {
        out.positive(format!("link parameter {name}"), v);
    }
}

fn check_catalog(sc: &Scenario, out: &mut Collector) {
    let c = &sc.catalog;
    let k_count = c.cycles_per_bit.len();
    let s_count = sc.topology.n_satellites;
    if k_count == 0 {
        out.push("catalog", "empty NF catalog");
    }
    if c.nf_storage.len() != k_count {
        out.push("catalog", format!("{} NF sizes for {k_count} NFs", c.nf_storage.len()));
    }
    if c.sat_compute.len() != s_count || c.sat_storage.len() != s_count {
        out.push("catalog", format!("satellite resource vectors do not have {s_count} entries"));
    }
    if c.allocation.len() != k_count || c.allocation.iter().any(|row| row.len() != c.sat_compute.len()) {
        out.push("catalog", "allocation matrix shape mismatch");
        return;
    }
    for (k, (&ck, &lk)) in c.cycles_per_bit.iter().zip(&c.nf_storage).enumerate() {
        out.positive(format!("NF {k} cycles per bit"), ck);
        out.positive(format!("NF {k} storage size"), lk);
    }
    for (s, (&cs, &ls)) in c.sat_compute.iter().zip(&c.sat_storage).enumerate() {
        out.positive(format!("satellite {s} compute capacity"), cs);
        if !(ls >= 0.0 && ls.is_finite()) {
            out.push(format!("satellite {s} storage capacity"), format!("must be non-negative, got {ls}"));
        }
    }
    for (k, row) in c.allocation.iter().enumerate() {
        for (s, &f) in row.iter().enumerate() {
            out.positive(format!("allocation (NF {k}, satellite {s})"), f);
            if f > c.sat_compute[s] {
                out.push(format!("allocation (NF {k}, satellite {s})"), "exceeds satellite compute capacity");
            }
        }
    }
    out.positive("data-center allocation", c.dc_allocation);
    out.positive("kappa", c.kappa);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_scenario, GenerationConfig};

    fn base() -> Scenario {
        generate_scenario(&GenerationConfig::default(), 11).unwrap()
    }

    #[test]
    fn well_formed_is_clean() {
        assert_eq!(validate_scenario(&base()), vec![]);
    }

    #[test]
    fn duplicate_nf_in_chain() {
        let mut s = base();
        s.chains[0].nfs = vec![3, 1, 3, 2];
        let v = validate_scenario(&s);
        assert_eq!(v.len(), 1);
        assert!(v[0].rule.contains("duplicate NF in chain"));
        assert_eq!(v[0].entity, "chain 0");
    }

    #[test]
    fn multiple_associations() {
        let mut s = base();
        s.terminals[2].associated = vec![0, 1];
        let v = validate_scenario(&s);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, "multiple associations");
        assert_eq!(v[0].entity, "terminal 2");
    }

    #[test]
    fn broken_hops_and_sizes() {
        let mut s = base();
        s.topology.hops[0][1] = 3;
        s.terminals[0].input_sizes[1] = 0.0;
        let v = validate_scenario(&s);
        assert!(v.iter().any(|x| x.rule.contains("not symmetric")));
        assert!(v.iter().any(|x| x.rule.contains("input size")));
        assert!(v.iter().any(|x| x.rule.contains("one hop apart")));
    }

    #[test]
    fn allocation_above_capacity() {
        let mut s = base();
        s.catalog.allocation[0][0] = s.catalog.sat_compute[0] * 2.0;
        let v = validate_scenario(&s);
        assert!(v.iter().any(|x| x.rule.contains("exceeds satellite compute")));
    }
}
