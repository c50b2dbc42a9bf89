use crate::error::{Error, Result};

use super::{ClassKey, ClassTable, Network};

/// Number of edges joining an infected and an uninfected node.
pub fn cross_group_ties(net: &Network) -> usize {
    net.edges()
        .filter(|&(u, v)| net.is_infected(u) != net.is_infected(v))
        .count()
}

/// Number of infected alters of node `i`.
pub fn node_cross_alters(net: &Network, i: usize) -> Result<usize> {
    net.check_node(i)?;
    Ok(net
        .neighbors(i)
        .iter()
        .filter(|&&j| net.is_infected(j as usize))
        .count())
}

/// Integer node counts by (degree, infection). Isolated nodes land in degree 0.
pub fn class_table(net: &Network) -> ClassTable {
    let mut counts = std::collections::BTreeMap::<ClassKey, u64>::new();
    for i in 0..net.node_count() {
        *counts
            .entry(ClassKey::new(net.degree(i) as u32, net.is_infected(i)))
            .or_default() += 1;
    }
    ClassTable::from_counts(counts)
}

#[derive(Clone, Debug, PartialEq)]
pub struct NetStats {
    pub cross_ties: usize,
    pub within1_ties: usize,
    pub within0_ties: usize,
    pub mean_degree: f64,
    /// Infected-infected tie density over cross tie density. `f64::INFINITY`
    /// when there are no cross ties.
    pub homophily_r: f64,
    /// Mean degree of infected nodes over mean degree of uninfected nodes.
    pub activity_w: f64,
}

impl NetStats {
    pub fn homophily_is_finite(&self) -> bool {
        self.homophily_r.is_finite()
    }
}

/// Mixing counts plus the empirical homophily and activity ratios.
pub fn mixing_and_ratios(net: &Network) -> Result<NetStats> {
    let n = net.node_count();
    let n1 = net.infected_count();
    let n0 = n - n1;
    if n1 < 2 || n0 < 1 {
        return Err(Error::DegenerateGroups {
            infected: n1,
            uninfected: n0,
        });
    }
    let (mut cross, mut w1, mut w0) = (0usize, 0usize, 0usize);
    for (u, v) in net.edges() {
        match (net.is_infected(u), net.is_infected(v)) {
            (true, true) => w1 += 1,
            (false, false) => w0 += 1,
            _ => cross += 1,
        }
    }
    let (n1f, n0f) = (n1 as f64, n0 as f64);
    let homophily_r = if cross == 0 {
        f64::INFINITY
    } else {
        let density11 = w1 as f64 / (n1f * (n1f - 1.0) / 2.0);
        let density10 = cross as f64 / (n1f * n0f);
        density11 / density10
    };
    let deg1: usize = (0..n).filter(|&i| net.is_infected(i)).map(|i| net.degree(i)).sum();
    let deg0 = 2 * net.edge_count() - deg1;
    let activity_w = (deg1 as f64 / n1f) / (deg0 as f64 / n0f);
    Ok(NetStats {
        cross_ties: cross,
        within1_ties: w1,
        within0_ties: w0,
        mean_degree: 2.0 * net.edge_count() as f64 / n as f64,
        homophily_r,
        activity_w,
    })
}

/// `EP_k` for `k = 0..N-2`: edges whose endpoints share exactly `k` alters.
pub fn edgewise_shared_partners(net: &Network) -> Vec<u64> {
    let mut ep = vec![0u64; net.node_count().saturating_sub(1)];
    for (u, v) in net.edges() {
        let shared = sorted_intersection_len(net.neighbors(u), net.neighbors(v));
        ep[shared] += 1;
    }
    ep
}

fn sorted_intersection_len(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Geometrically weighted edgewise shared partner statistic with decay `theta`.
pub fn gwesp(net: &Network, theta: f64) -> Result<f64> {
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "gwesp decay must be finite and >= 0, got {theta}"
        )));
    }
    let ep = edgewise_shared_partners(net);
    let base = 1.0 - (-theta).exp();
    let sum: f64 = ep
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &count)| (1.0 - base.powi(i as i32)) * count as f64)
        .sum();
    Ok(theta.exp() * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn net(z: &[u8], edges: &[(usize, usize)]) -> Network {
        Network::from_edges(z.iter().map(|&x| x == 1).collect(), edges.iter().copied()).unwrap()
    }

    fn clique(n: usize) -> Network {
        let edges: Vec<_> = (0..n)
            .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
            .collect();
        Network::from_edges(vec![false; n], edges).unwrap()
    }

    #[test]
    fn cross_ties_examples() {
        let all = net(&[1, 1, 1], &[(0, 1), (1, 2)]);
        assert_eq!(cross_group_ties(&all), 0);
        assert_eq!(cross_group_ties(&net(&[1, 0], &[(0, 1)])), 1);
        // Brute force over ordered pairs: only 0-2 and 1-3 are discordant.
        let five = net(&[1, 1, 0, 0, 0], &[(0, 1), (0, 2), (1, 3), (2, 4), (3, 4)]);
        let brute = (0..5)
            .flat_map(|i| (0..5).map(move |j| (i, j)))
            .filter(|&(i, j)| five.has_edge(i, j) && five.is_infected(i) && !five.is_infected(j))
            .count();
        assert_eq!(brute, 2);
        assert_eq!(cross_group_ties(&five), brute);
    }

    #[test]
    fn cross_alters_examples() {
        let star = net(&[0, 1, 1, 1, 0], &[(0, 1), (0, 2), (0, 3)]);
        assert_eq!(node_cross_alters(&star, 0).unwrap(), 3);
        assert_eq!(node_cross_alters(&star, 4).unwrap(), 0);
        assert!(node_cross_alters(&star, 5).is_err());
    }

    #[test]
    fn class_table_examples() {
        let empty = net(&[0, 0, 0], &[]);
        let t = class_table(&empty);
        assert_eq!(t.len(), 1);
        assert_eq!(t.get(ClassKey::new(0, false)), 3.0);

        let tri = net(&[1, 0, 0], &[(0, 1), (1, 2), (0, 2)]);
        let t = class_table(&tri);
        assert_eq!(t.get(ClassKey::new(2, true)), 1.0);
        assert_eq!(t.get(ClassKey::new(2, false)), 2.0);
        assert_eq!(t.total(), 3.0);
    }

    #[test]
    fn ratios_on_constructed_graphs() {
        // Infected {0,1} each with degree 2, uninfected {2,3} each with degree 1.
        let g = net(&[1, 1, 0, 0], &[(0, 1), (0, 2), (1, 3)]);
        let s = mixing_and_ratios(&g).unwrap();
        assert_eq!((s.cross_ties, s.within1_ties, s.within0_ties), (2, 1, 0));
        assert!((s.activity_w - 2.0).abs() < 1e-12);
        // density11 = 1/1, density10 = 2/4
        assert!((s.homophily_r - 2.0).abs() < 1e-12);
        assert!((s.mean_degree - 1.5).abs() < 1e-12);

        let segregated = net(&[1, 1, 0, 0], &[(0, 1), (2, 3)]);
        let s = mixing_and_ratios(&segregated).unwrap();
        assert!(!s.homophily_is_finite());

        assert!(matches!(
            mixing_and_ratios(&net(&[1, 0, 0], &[(0, 1)])),
            Err(Error::DegenerateGroups { .. })
        ));
    }

    #[test]
    fn shared_partner_examples() {
        let tri = net(&[0, 0, 0], &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(edgewise_shared_partners(&tri), vec![0, 3]);
        let path = net(&[0, 0, 0], &[(0, 1), (1, 2)]);
        assert_eq!(edgewise_shared_partners(&path), vec![2, 0]);
        let k4 = clique(4);
        assert_eq!(edgewise_shared_partners(&k4), vec![0, 0, 6]);
    }

    #[test]
    fn gwesp_examples() {
        let tri = net(&[0, 0, 0], &[(0, 1), (1, 2), (0, 2)]);
        assert!((gwesp(&tri, 0.0).unwrap() - 3.0).abs() < 1e-12);
        let path = net(&[0, 0, 0, 0], &[(0, 1), (1, 2), (2, 3)]);
        for theta in [0.0, 0.5, 2.0] {
            assert_eq!(gwesp(&path, theta).unwrap(), 0.0);
        }
        let e = std::f64::consts::E;
        let expected = e * (1.0 - (1.0 - 1.0 / e).powi(2)) * 6.0;
        assert!((gwesp(&clique(4), 1.0).unwrap() - expected).abs() < 1e-12);
        assert!(gwesp(&tri, -0.1).is_err());
    }

    fn arb_network() -> impl Strategy<Value = Network> {
        (2usize..14).prop_flat_map(|n| {
            let pairs = n * (n - 1) / 2;
            (
                proptest::collection::vec(any::<bool>(), n),
                proptest::collection::vec(any::<bool>(), pairs),
            )
                .prop_map(move |(z, mask)| {
                    let edges = (0..n)
                        .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
                        .zip(mask)
                        .filter_map(|(e, keep)| keep.then_some(e));
                    Network::from_edges(z, edges).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn census_identity_factor_two(g in arb_network()) {
            let lhs: usize = (0..g.node_count())
                .map(|i| {
                    let x = node_cross_alters(&g, i).unwrap();
                    let d = g.degree(i);
                    if g.is_infected(i) { d - x } else { x }
                })
                .sum();
            prop_assert_eq!(lhs, 2 * cross_group_ties(&g));
            prop_assert_eq!(g.degrees().iter().map(|&d| d as u64).sum::<u64>() % 2, 0);
        }

        #[test]
        fn tie_counts_partition_edges(g in arb_network()) {
            if let Ok(s) = mixing_and_ratios(&g) {
                prop_assert_eq!(s.cross_ties + s.within0_ties + s.within1_ties, g.edge_count());
            }
            let ep = edgewise_shared_partners(&g);
            prop_assert_eq!(ep.iter().sum::<u64>() as usize, g.edge_count());
            let gw0 = gwesp(&g, 0.0).unwrap();
            prop_assert!((gw0 - (g.edge_count() as f64 - ep[0] as f64)).abs() < 1e-9);
        }
    }
}
