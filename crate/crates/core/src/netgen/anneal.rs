//! Simulated annealing over tetrad toggles toward a target cross-tie count.

use rand::Rng;

use crate::netcore::Network;

use super::swap::SwapGraph;

#[derive(Clone, Debug, PartialEq)]
pub struct AnnealSchedule {
    pub initial_temperature: f64,
    /// Geometric cooling factor applied after every proposal.
    pub cooling: f64,
    pub min_temperature: f64,
    /// Proposal budget as a multiple of the edge count.
    pub proposals_per_edge: usize,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        Self {
            initial_temperature: 1.0,
            cooling: 0.999,
            min_temperature: 1e-4,
            proposals_per_edge: 500,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AnnealOutcome {
    pub network: Network,
    pub achieved: usize,
    /// `|achieved - target|`.
    pub residual: f64,
    pub proposals: usize,
    pub accepted: usize,
}

impl AnnealOutcome {
    pub fn reached(&self) -> bool {
        self.residual < 1.0
    }
}

/// Smallest residual any network with the same degrees and labels can reach.
/// Toggles change the cross-tie count by an even amount, so its parity is fixed.
fn parity_floor(cross: usize, target: f64) -> f64 {
    let parity = (cross % 2) as i64;
    let base = target.floor() as i64;
    (base - 2..=base + 2)
        .filter(|&c| c >= 0 && c.rem_euclid(2) == parity)
        .map(|c| (c as f64 - target).abs())
        .fold(f64::INFINITY, f64::min)
}

/// Anneal `net` toward `target` cross-group ties while preserving degrees and
/// infection labels. Stops once within 1 of the target (or as close as parity
/// allows) or when the proposal budget runs out, returning the best state seen.
pub fn anneal_to_crossties<R: Rng + ?Sized>(
    net: &Network,
    target: f64,
    schedule: &AnnealSchedule,
    rng: &mut R,
) -> AnnealOutcome {
    let mut g = SwapGraph::new(net);
    let residual = |cross: usize| (cross as f64 - target).abs();
    let floor = parity_floor(g.cross_ties(), target);
    let done = |r: f64| r < 1.0 || r <= floor + 1e-9;
    let mut current = residual(g.cross_ties());
    if done(current) || g.edge_count() < 2 {
        return AnnealOutcome {
            network: net.clone(),
            achieved: g.cross_ties(),
            residual: current,
            proposals: 0,
            accepted: 0,
        };
    }
    let budget = schedule.proposals_per_edge * g.edge_count();
    let mut temperature = schedule.initial_temperature;
    let mut best = current;
    // Snapshot of the best state, taken only when leaving it uphill.
    let mut best_state: Option<SwapGraph> = None;
    let (mut proposals, mut accepted) = (0, 0);
    while proposals < budget && !done(current) {
        proposals += 1;
        if let Some(t) = g.propose(rng) {
            let next = residual((g.cross_ties() as i64 + g.toggle_change(&t)) as usize);
            let worsening = next - current;
            let accept = worsening <= 0.0 || rng.random::<f64>() < (-worsening / temperature).exp();
            if accept {
                if worsening > 0.0 && current <= best {
                    best_state = Some(g.clone());
                    best = current;
                }
                g.toggle(&t);
                current = next;
                accepted += 1;
                if current < best {
                    best = current;
                    best_state = None;
                }
            }
        }
        temperature = (temperature * schedule.cooling).max(schedule.min_temperature);
    }
    if current > best {
        if let Some(saved) = best_state {
            g = saved;
            current = best;
        }
    }
    AnnealOutcome {
        network: g.to_network(),
        achieved: g.cross_ties(),
        residual: current,
        proposals,
        accepted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::cross_group_ties;
    use crate::netgen::{gen_bernoulli_mixing, reed_molloy, MixingSpec};
    use crate::rng::seeded;

    #[test]
    fn on_target_input_is_returned_unchanged() {
        let net = Network::from_edges(vec![true, false, true, false], [(0, 1), (2, 3)]).unwrap();
        let out = anneal_to_crossties(&net, 2.0, &AnnealSchedule::default(), &mut seeded(1));
        assert_eq!(out.network, net);
        assert_eq!((out.proposals, out.accepted), (0, 0));
    }

    #[test]
    fn perfect_matching_reaches_cross_group_pairing() {
        // d = (1,1,1,1), z = (1,1,0,0): realizations {01,23} g=0, {02,13} and {03,12} g=2.
        let start = Network::from_edges(vec![true, true, false, false], [(0, 1), (2, 3)]).unwrap();
        for seed in 0..20 {
            let out = anneal_to_crossties(&start, 2.0, &AnnealSchedule::default(), &mut seeded(seed));
            assert_eq!(out.achieved, 2);
            assert!(!out.network.has_edge(0, 1) && !out.network.has_edge(2, 3));
            assert_eq!(out.network.degrees(), vec![1; 4]);
        }
    }

    #[test]
    fn parity_bounds_the_residual() {
        assert_eq!(parity_floor(4, 5.0), 1.0);
        assert_eq!(parity_floor(4, 5.5), 0.5);
        assert_eq!(parity_floor(3, 0.2), 0.8);
        // g = 0 start, target 1: nothing closer than 1 exists, so stop at once.
        let start = Network::from_edges(vec![true, true, false, false], [(0, 1), (2, 3)]).unwrap();
        let out = anneal_to_crossties(&start, 1.0, &AnnealSchedule::default(), &mut seeded(4));
        assert_eq!(out.proposals, 0);
    }

    #[test]
    fn unreachable_target_reports_residual() {
        let start = Network::from_edges(vec![true, true, false, false], [(0, 1), (2, 3)]).unwrap();
        let out = anneal_to_crossties(&start, 5.0, &AnnealSchedule::default(), &mut seeded(4));
        assert_eq!(out.residual, 3.0);
        assert_eq!(out.achieved, 2);
        assert!(!out.reached());
    }

    #[test]
    fn reaches_targets_on_default_populations() {
        let spec = MixingSpec::default();
        let runs = 20;
        let mut hits = 0;
        for seed in 0..runs {
            let mut rng = seeded(seed);
            let pop = gen_bernoulli_mixing(&spec, &mut rng).unwrap();
            let target = cross_group_ties(&pop) as f64 + 0.4;
            let start = reed_molloy(&pop.degrees(), pop.infection(), &mut rng).unwrap();
            let out = anneal_to_crossties(&start, target, &AnnealSchedule::default(), &mut rng);
            assert_eq!(out.network.degrees(), pop.degrees());
            assert_eq!(out.achieved, cross_group_ties(&out.network));
            hits += usize::from(out.reached());
        }
        assert!(hits as f64 >= 0.95 * runs as f64, "{hits}/{runs}");
    }
}
