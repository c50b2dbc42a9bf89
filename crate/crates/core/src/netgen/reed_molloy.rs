//! Configuration-model construction of a simple graph with a given degree
//! sequence.

use rand::seq::SliceRandom;
use rand::Rng;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::netcore::edge_key;
use crate::netcore::Network;

/// Repair attempts allowed per edge before giving up.
const REPAIR_ATTEMPTS_PER_EDGE: usize = 100;

struct Multigraph {
    edges: Vec<(u32, u32)>,
    mult: FxHashMap<u64, u32>,
}

impl Multigraph {
    fn penalty(&self, u: u32, v: u32) -> u32 {
        let m = self.mult.get(&edge_key(u, v)).copied().unwrap_or(0);
        if u == v {
            m
        } else {
            m.saturating_sub(1)
        }
    }

    fn is_bad(&self, pos: usize) -> bool {
        let (u, v) = self.edges[pos];
        u == v || self.mult[&edge_key(u, v)] > 1
    }

    fn remove(&mut self, u: u32, v: u32) {
        let key = edge_key(u, v);
        let m = self.mult.get_mut(&key).expect("edge present");
        *m -= 1;
        if *m == 0 {
            self.mult.remove(&key);
        }
    }

    fn insert(&mut self, u: u32, v: u32) {
        *self.mult.entry(edge_key(u, v)).or_insert(0) += 1;
    }

    /// Penalty of the four pairs touched by replacing `old` with `new`.
    fn local_penalty(&self, pairs: [(u32, u32); 4]) -> u32 {
        let mut seen: Vec<u64> = Vec::with_capacity(4);
        pairs
            .iter()
            .filter(|&&(u, v)| {
                let k = edge_key(u, v);
                let fresh = !seen.contains(&k);
                seen.push(k);
                fresh
            })
            .map(|&(u, v)| self.penalty(u, v))
            .sum()
    }
}

/// Stub-match the degree sequence once, then remove self-loops and multi-edges
/// by degree-preserving swaps of a conflicting edge against a random partner.
/// Swaps that would add conflicts are refused. Fails after `100 * E` attempts.
pub fn reed_molloy<R: Rng + ?Sized>(
    degrees: &[u32],
    infected: &[bool],
    rng: &mut R,
) -> Result<Network> {
    let n = degrees.len();
    if infected.len() != n {
        return Err(Error::InvalidParameter(format!(
            "{} degrees but {} infection labels",
            n,
            infected.len()
        )));
    }
    let total: u64 = degrees.iter().map(|&d| u64::from(d)).sum();
    if total % 2 == 1 {
        return Err(Error::OddDegreeSum(total));
    }
    if let Some(&d) = degrees.iter().find(|&&d| d as usize >= n.max(1)) {
        return Err(Error::NotGraphical(format!(
            "degree {d} with only {n} nodes"
        )));
    }
    let mut stubs: Vec<u32> = degrees
        .iter()
        .enumerate()
        .flat_map(|(i, &d)| std::iter::repeat_n(i as u32, d as usize))
        .collect();
    stubs.shuffle(rng);
    let mut g = Multigraph {
        edges: stubs.chunks_exact(2).map(|c| (c[0], c[1])).collect(),
        mult: FxHashMap::default(),
    };
    for i in 0..g.edges.len() {
        let (u, v) = g.edges[i];
        g.insert(u, v);
    }

    let m = g.edges.len();
    let mut bad: Vec<usize> = (0..m).filter(|&p| g.is_bad(p)).collect();
    let budget = REPAIR_ATTEMPTS_PER_EDGE * m.max(1);
    let mut attempts = 0;
    while !bad.is_empty() {
        if attempts >= budget || m < 2 {
            return Err(Error::NotGraphical(format!(
                "{} conflicting edges remain after {attempts} repair attempts",
                bad.len()
            )));
        }
        attempts += 1;
        let pos = bad[rng.random_range(0..bad.len())];
        let mut partner = rng.random_range(0..m - 1);
        if partner >= pos {
            partner += 1;
        }
        let (a, b) = g.edges[pos];
        let (mut c, mut d) = g.edges[partner];
        if rng.random::<bool>() {
            std::mem::swap(&mut c, &mut d);
        }
        let pairs = [(a, b), (c, d), (a, c), (b, d)];
        let before = g.local_penalty(pairs);
        g.remove(a, b);
        g.remove(c, d);
        g.insert(a, c);
        g.insert(b, d);
        let after = g.local_penalty(pairs);
        if after <= before {
            g.edges[pos] = (a, c);
            g.edges[partner] = (b, d);
            if after < before {
                bad = (0..m).filter(|&p| g.is_bad(p)).collect();
            }
        } else {
            g.remove(a, c);
            g.remove(b, d);
            g.insert(a, b);
            g.insert(c, d);
        }
    }
    Ok(Network::from_simple_edges(infected.to_vec(), &g.edges))
}
