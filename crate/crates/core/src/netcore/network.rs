use rustc_hash::FxHashSet;

use crate::error::{Error, Result};

#[inline]
pub(crate) fn edge_key(u: u32, v: u32) -> u64 {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    (u64::from(a) << 32) | u64::from(b)
}

/// Simple undirected graph over dense ids `0..N` with one binary covariate
/// ("infected") per node.
///
/// Immutable once built. Neighbor lists are sorted; edge membership is a hash
/// lookup.
#[derive(Clone, Debug)]
pub struct Network {
    infected: Vec<bool>,
    adj: Vec<Vec<u32>>,
    edges: FxHashSet<u64>,
}

impl Network {
    /// Build from an edge list, rejecting self-loops, duplicates and
    /// out-of-range ids.
    pub fn from_edges<I>(infected: Vec<bool>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let n = infected.len();
        let mut adj = vec![Vec::new(); n];
        let mut set = FxHashSet::default();
        for (u, v) in edges {
            for id in [u, v] {
                if id >= n {
                    return Err(Error::InvalidNode { id, node_count: n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if !set.insert(edge_key(u as u32, v as u32)) {
                return Err(Error::DuplicateEdge(u.min(v), u.max(v)));
            }
            adj[u].push(v as u32);
            adj[v].push(u as u32);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Self {
            infected,
            adj,
            edges: set,
        })
    }

    /// Build from edges already known to be simple and in range.
    pub(crate) fn from_simple_edges(infected: Vec<bool>, edges: &[(u32, u32)]) -> Self {
        let n = infected.len();
        let mut adj = vec![Vec::new(); n];
        let mut set = FxHashSet::with_capacity_and_hasher(edges.len(), Default::default());
        for &(u, v) in edges {
            debug_assert!(u != v);
            let fresh = set.insert(edge_key(u, v));
            debug_assert!(fresh, "duplicate edge ({u}, {v})");
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Self {
            infected,
            adj,
            edges: set,
        }
    }

    pub fn empty(infected: Vec<bool>) -> Self {
        Self::from_simple_edges(infected, &[])
    }

    pub fn node_count(&self) -> usize {
        self.infected.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.adj.iter().map(|a| a.len() as u32).collect()
    }

    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.adj[i]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.edges.contains(&edge_key(u as u32, v as u32))
    }

    pub fn is_infected(&self, i: usize) -> bool {
        self.infected[i]
    }

    pub fn infection(&self) -> &[bool] {
        &self.infected
    }

    pub fn infected_count(&self) -> usize {
        self.infected.iter().filter(|&&z| z).count()
    }

    pub fn prevalence(&self) -> f64 {
        if self.infected.is_empty() {
            return 0.0;
        }
        self.infected_count() as f64 / self.node_count() as f64
    }

    /// Edges as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .filter(move |&&v| (v as usize) > u)
                .map(move |&v| (u, v as usize))
        })
    }

    pub(crate) fn edge_list(&self) -> Vec<(u32, u32)> {
        self.edges().map(|(u, v)| (u as u32, v as u32)).collect()
    }

    pub(crate) fn check_node(&self, i: usize) -> Result<()> {
        if i < self.node_count() {
            Ok(())
        } else {
            Err(Error::InvalidNode {
                id: i,
                node_count: self.node_count(),
            })
        }
    }
}

impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        self.infected == other.infected && self.adj == other.adj
    }
}

impl Eq for Network {}
