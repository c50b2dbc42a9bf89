//! Degree-preserving tetrad toggles.
//!
//! A tetrad is an ordered quad `(i, j, k, l)` of distinct nodes. In the plus
//! configuration `ij` and `kl` are ties while `il` and `jk` are not; the minus
//! configuration is the reverse. Toggling between the two keeps every degree.

use rand::Rng;
use rustc_hash::FxHashMap;

use crate::netcore::edge_key;
use crate::netcore::Network;

/// Rejection budget for [`sample_valid_tetrad`].
pub const TETRAD_MAX_REJECTIONS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TetradState {
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Tetrad {
    pub nodes: [u32; 4],
    /// Configuration currently present in the network.
    pub state: TetradState,
}

impl Tetrad {
    fn plus_pairs(&self) -> [(u32, u32); 2] {
        let [i, j, k, l] = self.nodes;
        [(i, j), (k, l)]
    }

    fn minus_pairs(&self) -> [(u32, u32); 2] {
        let [i, j, k, l] = self.nodes;
        [(i, l), (j, k)]
    }

    pub fn is_plus(&self) -> bool {
        self.state == TetradState::Plus
    }

    /// Change in cross-group ties going from the minus to the plus
    /// configuration, with everything outside the quad held fixed.
    pub fn delta(&self, infected: &[bool]) -> i8 {
        let cross = |(a, b): (u32, u32)| i8::from(infected[a as usize] != infected[b as usize]);
        let [p1, p2] = self.plus_pairs();
        let [m1, m2] = self.minus_pairs();
        cross(p1) + cross(p2) - cross(m1) - cross(m2)
    }

    /// Pairs present now and pairs present after toggling.
    pub fn toggle_pairs(&self) -> ([(u32, u32); 2], [(u32, u32); 2]) {
        match self.state {
            TetradState::Plus => (self.plus_pairs(), self.minus_pairs()),
            TetradState::Minus => (self.minus_pairs(), self.plus_pairs()),
        }
    }

    /// Same quad after toggling.
    pub fn flipped(&self) -> Self {
        Self {
            nodes: self.nodes,
            state: match self.state {
                TetradState::Plus => TetradState::Minus,
                TetradState::Minus => TetradState::Plus,
            },
        }
    }
}

/// Pick two distinct edges uniformly and orient each uniformly. Returns the
/// quad in plus configuration, or `None` when the draw collides or one of the
/// required non-ties is present.
#[inline]
fn propose_plus<R, F>(edges: &[(u32, u32)], has_edge: F, rng: &mut R) -> Option<Tetrad>
where
    R: Rng + ?Sized,
    F: Fn(u32, u32) -> bool,
{
    let m = edges.len();
    if m < 2 {
        return None;
    }
    let a = rng.random_range(0..m);
    let mut b = rng.random_range(0..m - 1);
    if b >= a {
        b += 1;
    }
    let bits: u8 = rng.random();
    let (mut i, mut j) = edges[a];
    if bits & 1 == 1 {
        std::mem::swap(&mut i, &mut j);
    }
    let (mut k, mut l) = edges[b];
    if bits & 2 == 2 {
        std::mem::swap(&mut k, &mut l);
    }
    if i == k || i == l || j == k || j == l {
        return None;
    }
    if has_edge(i, l) || has_edge(j, k) {
        return None;
    }
    Some(Tetrad {
        nodes: [i, j, k, l],
        state: TetradState::Plus,
    })
}

/// Present a plus-configuration quad as either itself or its relabeled minus
/// twin `(i, l, k, j)`, with equal probability. Over both presentations this is
/// uniform on all valid ordered quads.
#[inline]
fn present<R: Rng + ?Sized>(t: Tetrad, rng: &mut R) -> Tetrad {
    if rng.random::<bool>() {
        t
    } else {
        let [i, j, k, l] = t.nodes;
        Tetrad {
            nodes: [i, l, k, j],
            state: TetradState::Minus,
        }
    }
}

/// Repeated uniform tetrad draws from a fixed network.
pub struct TetradSampler<'a> {
    net: &'a Network,
    edges: Vec<(u32, u32)>,
}

impl<'a> TetradSampler<'a> {
    pub fn new(net: &'a Network) -> Self {
        Self {
            net,
            edges: net.edge_list(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Tetrad> {
        let has = |u: u32, v: u32| self.net.has_edge(u as usize, v as usize);
        (0..TETRAD_MAX_REJECTIONS)
            .find_map(|_| propose_plus(&self.edges, has, rng))
            .map(|t| present(t, rng))
    }
}

/// Draw one valid tetrad uniformly, or `None` after the rejection budget is
/// spent. Builds an edge list per call; use [`TetradSampler`] for bulk draws.
pub fn sample_valid_tetrad<R: Rng + ?Sized>(net: &Network, rng: &mut R) -> Option<Tetrad> {
    TetradSampler::new(net).sample(rng)
}

/// Mutable edge-list view of a network for swap-based chains.
#[derive(Clone, Debug)]
pub struct SwapGraph {
    infected: Vec<bool>,
    edges: Vec<(u32, u32)>,
    index: FxHashMap<u64, usize>,
    cross: usize,
}

impl SwapGraph {
    pub fn new(net: &Network) -> Self {
        let edges = net.edge_list();
        let index = edges
            .iter()
            .enumerate()
            .map(|(pos, &(u, v))| (edge_key(u, v), pos))
            .collect();
        let infected = net.infection().to_vec();
        let cross = edges
            .iter()
            .filter(|&&(u, v)| infected[u as usize] != infected[v as usize])
            .count();
        Self {
            infected,
            edges,
            index,
            cross,
        }
    }

    pub fn to_network(&self) -> Network {
        Network::from_simple_edges(self.infected.clone(), &self.edges)
    }

    pub fn node_count(&self) -> usize {
        self.infected.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn infection(&self) -> &[bool] {
        &self.infected
    }

    pub fn cross_ties(&self) -> usize {
        self.cross
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.index.contains_key(&edge_key(u, v))
    }

    /// Sorted `(min, max)` edge keys; a canonical fingerprint of the state.
    pub fn edge_keys(&self) -> Vec<u64> {
        let mut keys: Vec<u64> = self.index.keys().copied().collect();
        keys.sort_unstable();
        keys
    }

    pub fn degrees(&self) -> Vec<u32> {
        let mut d = vec![0u32; self.node_count()];
        for &(u, v) in &self.edges {
            d[u as usize] += 1;
            d[v as usize] += 1;
        }
        d
    }

    /// One proposal attempt for a chain: a plus-configuration quad whose
    /// toggle stays simple, or `None` (treated as a rejected step).
    pub fn propose<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Tetrad> {
        propose_plus(&self.edges, |u, v| self.has_edge(u, v), rng)
    }

    pub fn sample_valid_tetrad<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Tetrad> {
        (0..TETRAD_MAX_REJECTIONS)
            .find_map(|_| self.propose(rng))
            .map(|t| present(t, rng))
    }

    /// Change in cross-group ties if `t` were toggled now.
    pub fn toggle_change(&self, t: &Tetrad) -> i64 {
        let d = i64::from(t.delta(&self.infected));
        match t.state {
            TetradState::Plus => -d,
            TetradState::Minus => d,
        }
    }

    /// Apply the toggle. `t.state` must describe the current configuration.
    pub fn toggle(&mut self, t: &Tetrad) {
        let (old, new) = t.toggle_pairs();
        let change = self.toggle_change(t);
        for ((ou, ov), (nu, nv)) in old.into_iter().zip(new) {
            let pos = self
                .index
                .remove(&edge_key(ou, ov))
                .expect("toggle removes a tie that is not present");
            let (a, b) = if nu < nv { (nu, nv) } else { (nv, nu) };
            self.edges[pos] = (a, b);
            let prev = self.index.insert(edge_key(a, b), pos);
            debug_assert!(prev.is_none(), "toggle creates an existing tie");
        }
        self.cross = (self.cross as i64 + change) as usize;
    }
}
