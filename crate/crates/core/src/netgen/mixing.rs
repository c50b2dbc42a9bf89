//! Dyad-independent two-group mixing model used to generate study populations.

use rand::Rng;

use crate::error::{Error, Result};
use crate::netcore::Network;

/// Target features of a simulated population.
#[derive(Clone, Debug, PartialEq)]
pub struct MixingSpec {
    pub node_count: usize,
    pub prevalence: f64,
    pub mean_degree: f64,
    pub homophily_r: f64,
    pub activity_w: f64,
}

impl Default for MixingSpec {
    fn default() -> Self {
        Self {
            node_count: 1000,
            prevalence: 0.2,
            mean_degree: 7.0,
            homophily_r: 5.0,
            activity_w: 1.0,
        }
    }
}

impl MixingSpec {
    /// Number of infected nodes, `floor(N * mu + 0.5)`.
    pub fn infected_count(&self) -> usize {
        (self.node_count as f64 * self.prevalence + 0.5).floor() as usize
    }

    /// Prevalence actually realized by the deterministic labeling.
    pub fn realized_prevalence(&self) -> f64 {
        self.infected_count() as f64 / self.node_count as f64
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.node_count > 0
            && self.prevalence > 0.0
            && self.prevalence < 1.0
            && self.mean_degree > 0.0
            && self.mean_degree.is_finite()
            && self.homophily_r > 0.0
            && self.homophily_r.is_finite()
            && self.activity_w > 0.0
            && self.activity_w.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("{self:?}")))
        }
    }
}

/// Tie probabilities for the three cells of the 2x2 mixing matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixingCells {
    pub p11: f64,
    pub p00: f64,
    pub p10: f64,
}

/// Solve for the cell densities reproducing the target mean degree, homophily
/// and activity ratio in expectation.
///
/// With `d1 = (N1-1) p11 + N0 p10` and `d0 = (N0-1) p00 + N1 p10`, the system
/// `p11 = R p10`, `d1 = w d0`, `N1 d1 + N0 d0 = N dbar` has a closed form.
pub fn solve_mixing_cells(spec: &MixingSpec) -> Result<MixingCells> {
    spec.validate()?;
    let n = spec.node_count as f64;
    let n1 = spec.infected_count() as f64;
    let n0 = n - n1;
    if n1 < 1.0 || n0 < 2.0 {
        return Err(Error::InfeasibleSpec(format!(
            "groups of size {n1} and {n0} cannot carry the mixing structure"
        )));
    }
    let mean1 = n * spec.mean_degree / (n1 + n0 / spec.activity_w);
    let mean0 = mean1 / spec.activity_w;
    let p10 = mean1 / ((n1 - 1.0) * spec.homophily_r + n0);
    let p11 = spec.homophily_r * p10;
    let p00 = (mean0 - n1 * p10) / (n0 - 1.0);
    let cells = MixingCells { p11, p00, p10 };
    for (name, p) in [("p11", p11), ("p00", p00), ("p10", p10)] {
        if !(0.0..=1.0).contains(&p) || !p.is_finite() {
            return Err(Error::InfeasibleSpec(format!("{name} = {p}")));
        }
    }
    Ok(cells)
}

/// Draw a network with independent dyads at the solved cell densities. The
/// first `floor(N mu + 0.5)` nodes are infected.
pub fn gen_bernoulli_mixing<R: Rng + ?Sized>(spec: &MixingSpec, rng: &mut R) -> Result<Network> {
    let cells = solve_mixing_cells(spec)?;
    let n = spec.node_count;
    let n1 = spec.infected_count();
    let infected: Vec<bool> = (0..n).map(|i| i < n1).collect();
    let mut edges = Vec::with_capacity((spec.mean_degree * n as f64) as usize);
    for u in 0..n {
        for v in (u + 1)..n {
            let p = match (u < n1, v < n1) {
                (true, true) => cells.p11,
                (false, false) => cells.p00,
                _ => cells.p10,
            };
            if rng.random::<f64>() < p {
                edges.push((u as u32, v as u32));
            }
        }
    }
    Ok(Network::from_simple_edges(infected, &edges))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::mixing_and_ratios;
    use crate::rng::seeded;

    fn spec(n: usize, mu: f64, d: f64, r: f64, w: f64) -> MixingSpec {
        MixingSpec {
            node_count: n,
            prevalence: mu,
            mean_degree: d,
            homophily_r: r,
            activity_w: w,
        }
    }

    #[test]
    fn symmetric_spec_is_homogeneous() {
        let c = solve_mixing_cells(&spec(1000, 0.2, 7.0, 1.0, 1.0)).unwrap();
        let p = 7.0 / 999.0;
        for q in [c.p11, c.p00, c.p10] {
            assert!((q - p).abs() < 1e-15);
        }
    }

    #[test]
    fn default_cells_match_linear_solve() {
        // Frozen from a dense 3x3 linear solve of the defining equations.
        let c = solve_mixing_cells(&spec(1000, 0.2, 7.0, 5.0, 1.0)).unwrap();
        assert!((c.p11 - 1.949860724233984e-02).abs() < 1e-14);
        assert!((c.p00 - 7.784800638681358e-03).abs() < 1e-14);
        assert!((c.p10 - 3.899721448467970e-03).abs() < 1e-14);
    }

    #[test]
    fn infeasible_specs_error() {
        // R=1000 with dbar=7 at N=20 is still feasible: p11 is about 0.777.
        let c = solve_mixing_cells(&spec(20, 0.5, 7.0, 1000.0, 1.0)).unwrap();
        assert!(c.p11 > 0.77 && c.p11 < 0.78);
        // Raising dbar to 12 forces within-infected degree above 9.
        assert!(matches!(
            solve_mixing_cells(&spec(20, 0.5, 12.0, 1000.0, 1.0)),
            Err(Error::InfeasibleSpec(_))
        ));
        assert!(solve_mixing_cells(&spec(20, 0.5, 7.0, 1.0, 50.0)).is_err());
        assert!(solve_mixing_cells(&spec(20, 1.0, 7.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn labeling_and_sparsity() {
        let mut rng = seeded(1);
        let s = spec(1000, 0.2, 1e-9, 1.0, 1.0);
        let net = gen_bernoulli_mixing(&s, &mut rng).unwrap();
        assert_eq!(net.edge_count(), 0);
        assert_eq!(net.infected_count(), 200);
        assert!((0..200).all(|i| net.is_infected(i)));
        let odd = spec(15, 0.3, 2.0, 1.0, 1.0);
        let net = gen_bernoulli_mixing(&odd, &mut rng).unwrap();
        assert_eq!(net.infected_count(), 5);
    }

    fn mean_and_se(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, (v / n).sqrt())
    }

    #[test]
    fn defaults_reproduce_targets_in_expectation() {
        let s = MixingSpec::default();
        let mut rng = seeded(2024);
        let (mut d, mut r, mut w) = (vec![], vec![], vec![]);
        for _ in 0..200 {
            let net = gen_bernoulli_mixing(&s, &mut rng).unwrap();
            let st = mixing_and_ratios(&net).unwrap();
            d.push(st.mean_degree);
            r.push(st.homophily_r);
            w.push(st.activity_w);
        }
        for (xs, target) in [(&d, 7.0), (&r, 5.0), (&w, 1.0)] {
            let (m, se) = mean_and_se(xs);
            assert!((m - target).abs() < 3.0 * se + 1e-3, "{m} vs {target} (se {se})");
        }
    }

    #[test]
    fn homogeneous_cells_have_equal_empirical_density() {
        let s = spec(600, 0.3, 8.0, 1.0, 1.0);
        let mut rng = seeded(5);
        let (mut t11, mut t00, mut t10) = (0usize, 0usize, 0usize);
        let reps = 30;
        for _ in 0..reps {
            let st = mixing_and_ratios(&gen_bernoulli_mixing(&s, &mut rng).unwrap()).unwrap();
            t11 += st.within1_ties;
            t00 += st.within0_ties;
            t10 += st.cross_ties;
        }
        let (n1, n0) = (180.0, 420.0);
        let pairs = [n1 * (n1 - 1.0) / 2.0, n0 * (n0 - 1.0) / 2.0, n1 * n0];
        let p = 8.0 / 599.0;
        for (count, pairs) in [t11, t00, t10].into_iter().zip(pairs) {
            let trials = pairs * reps as f64;
            let se = (p * (1.0 - p) / trials).sqrt();
            assert!((count as f64 / trials - p).abs() < 4.0 * se);
        }
    }
}
