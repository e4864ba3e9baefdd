use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Converts a power level in dBW to watts.
pub fn dbw_to_watts(dbw: f64) -> f64 {
    10f64.powf(dbw / 10.0)
}

/// Per-link-class constants. Distances in meters, rates in bit/s, powers in
/// watts (configuration files carry dBW and are converted on load).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkParams {
    /// Terminal to associated satellite distance.
    pub d_u: f64,
    /// Distance covered by one ISL hop.
    pub d_s: f64,
    /// Satellite to ground station distance.
    pub d_g: f64,
    pub r_u: f64,
    pub r_s: f64,
    pub r_g: f64,
    pub p_u_w: f64,
    /// Transmit power of one ISL hop.
    pub p_s_w: f64,
    pub p_g_w: f64,
    pub light_speed: f64,
}

impl Default for LinkParams {
    fn default() -> Self {
        Self {
            d_u: 1.0e6,
            d_s: 8.0e5,
            d_g: 2.0e6,
            r_u: 2.0e8,
            r_s: 1.0e10,
            r_g: 3.0e8,
            p_u_w: dbw_to_watts(3.0),
            p_s_w: dbw_to_watts(30.0),
            p_g_w: dbw_to_watts(20.0),
            light_speed: 3.0e8,
        }
    }
}

/// Satellite graph with precomputed minimal hop counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub n_satellites: usize,
    /// Undirected ISLs, each stored once with `a < b`.
    pub links: Vec<[usize; 2]>,
    /// `hops[s][t]` is the minimal number of ISL hops between `s` and `t`.
    pub hops: Vec<Vec<u32>>,
    pub link: LinkParams,
}

impl Topology {
    /// Builds a topology from an explicit link list, computing hops by BFS.
    pub fn from_links(n_satellites: usize, links: impl IntoIterator<Item = [usize; 2]>, link: LinkParams) -> Result<Self> {
        if n_satellites == 0 {
            return Err(Error::Topology("no satellites".into()));
        }
        let mut set = BTreeSet::new();
        for [a, b] in links {
            if a >= n_satellites || b >= n_satellites {
                return Err(Error::Topology(format!("link ({a}, {b}) references a missing satellite")));
            }
            if a == b {
                return Err(Error::Topology(format!("self-loop on satellite {a}")));
            }
            set.insert([a.min(b), a.max(b)]);
        }
        let links: Vec<[usize; 2]> = set.into_iter().collect();
        let hops = bfs_hops(n_satellites, &links);
        if let Some(s) = hops[0].iter().position(|&h| h == u32::MAX) {
            return Err(Error::Topology(format!("satellite {s} is unreachable from satellite 0")));
        }
        Ok(Self { n_satellites, links, hops, link })
    }

    pub fn hops(&self, s: usize, t: usize) -> u32 {
        self.hops[s][t]
    }

    pub fn degree(&self, s: usize) -> usize {
        self.links.iter().filter(|l| l[0] == s || l[1] == s).count()
    }

    pub fn max_hops(&self) -> u32 {
        self.hops.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Satellites ordered by hop distance from `s`, ties broken by index.
    pub fn by_distance_from(&self, s: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.n_satellites).collect();
        order.sort_by_key(|&t| (self.hops[s][t], t));
        order
    }
}

fn bfs_hops(n: usize, links: &[[usize; 2]]) -> Vec<Vec<u32>> {
    let mut adj = vec![Vec::new(); n];
    for &[a, b] in links {
        adj[a].push(b);
        adj[b].push(a);
    }
    (0..n)
        .map(|src| {
            let mut dist = vec![u32::MAX; n];
            dist[src] = 0;
            let mut queue = VecDeque::from([src]);
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v] {
                    if dist[w] == u32::MAX {
                        dist[w] = dist[v] + 1;
                        queue.push_back(w);
                    }
                }
            }
            dist
        })
        .collect()
}

/// Circulant ring: satellite `s` links to `s ± o (mod n)` for every offset `o`.
/// Link parameters default to the standard constellation constants.
pub fn build_topology(n_satellites: usize, link_offsets: &[usize]) -> Result<Topology> {
    if n_satellites < 2 {
        return Err(Error::Topology(format!("need at least 2 satellites, got {n_satellites}")));
    }
    if link_offsets.is_empty() {
        return Err(Error::Topology("no ring offsets given".into()));
    }
    if let Some(&o) = link_offsets.iter().find(|&&o| o == 0 || o > n_satellites / 2) {
        return Err(Error::Topology(format!("offset {o} outside [1, {}]", n_satellites / 2)));
    }
    let links = (0..n_satellites).flat_map(|s| link_offsets.iter().map(move |&o| [s, (s + o) % n_satellites]));
    Topology::from_links(n_satellites, links, LinkParams::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive shortest path in a circulant graph: the fewest signed
    /// offset steps `sum(c_i * o_i) == b - a (mod n)`, searching every
    /// coefficient vector with `|c_i| <= n`.
    fn circulant_distance(n: usize, offsets: &[usize], a: usize, b: usize) -> u32 {
        fn search(n: i64, offsets: &[i64], target: i64, acc: i64, used: u32, best: &mut u32) {
            match offsets.split_first() {
                None => {
                    if (acc - target).rem_euclid(n) == 0 {
                        *best = (*best).min(used);
                    }
                }
                Some((&o, rest)) => {
                    for c in -n..=n {
                        search(n, rest, target, acc + c * o, used + c.unsigned_abs() as u32, best);
                    }
                }
            }
        }
        let offsets: Vec<i64> = offsets.iter().map(|&o| o as i64).collect();
        let mut best = u32::MAX;
        search(n as i64, &offsets, b as i64 - a as i64, 0, 0, &mut best);
        best
    }

    #[test]
    fn c8_with_two_offsets_is_four_regular() {
        let t = build_topology(8, &[1, 2]).unwrap();
        assert!((0..8).all(|s| t.degree(s) == 4));
        assert_eq!(t.max_hops(), 2);
    }

    #[test]
    fn two_node_ring() {
        let t = build_topology(2, &[1]).unwrap();
        assert_eq!(t.hops, vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn plain_ring_opposite_node() {
        let t = build_topology(8, &[1]).unwrap();
        assert_eq!(t.hops(0, 4), 4);
    }

    #[test]
    fn rejects_bad_offsets() {
        assert!(build_topology(8, &[]).is_err());
        assert!(build_topology(8, &[5]).is_err());
        assert!(build_topology(1, &[1]).is_err());
    }

    #[test]
    fn disconnected_graph_is_an_error() {
        // Offset 2 alone splits an even ring into two cycles.
        let err = build_topology(8, &[2]).unwrap_err();
        assert!(matches!(err, Error::Topology(_)));
    }

    #[test]
    fn bfs_matches_circulant_distance() {
        for n in 2..=16 {
            for offsets in [vec![1], vec![1, 2], vec![1, 3], vec![2, 3]] {
                if offsets.iter().any(|&o| o > n / 2) {
                    continue;
                }
                let Ok(t) = build_topology(n, &offsets) else { continue };
                for a in 0..n {
                    for b in 0..n {
                        assert_eq!(t.hops(a, b), circulant_distance(n, &offsets, a, b), "n={n} {offsets:?} {a}->{b}");
                    }
                }
            }
        }
    }

    #[test]
    fn nearest_ordering_breaks_ties_by_index() {
        let t = build_topology(8, &[1, 2]).unwrap();
        assert_eq!(t.by_distance_from(0), vec![0, 1, 2, 6, 7, 3, 4, 5]);
    }

    #[test]
    fn dbw_conversion() {
        assert!((dbw_to_watts(20.0) - 100.0).abs() < 1e-12);
        assert!((dbw_to_watts(30.0) - 1000.0).abs() < 1e-9);
    }
}
