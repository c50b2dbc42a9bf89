//! Fitting the one-parameter cross-tie model by tetradic pseudo-likelihood.
//!
//! The obvious dyadic pseudo-likelihood treats each dyad as a logistic
//! regression given the rest of the graph. Under fixed degrees that fails:
//! toggling one dyad changes two degrees, so every full conditional is
//! degenerate and the resulting fit is meaningless. The smallest move that
//! keeps degrees fixed toggles a tetrad (two edges and two non-edges on four
//! nodes), and conditioning on the rest of the graph gives a logistic model in
//! the change statistic `delta`:
//!
//! ```text
//! P(plus | rest) = 1 / (1 + exp(-eta * delta))
//! ```
//!
//! The estimate maximizes the mean of that log-likelihood over a uniform
//! sample of valid tetrads.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::netcore::{ClassTable, Network};
use crate::netgen::{anneal_to_crossties, reed_molloy, AnnealOutcome, AnnealSchedule, TetradSampler};
use crate::rng;

/// Bound on |eta| returned when the pseudo-likelihood is maximized at infinity.
pub const ETA_CAP: f64 = 10.0;
pub const MAX_NEWTON_ITERATIONS: usize = 50;
pub const GRADIENT_TOLERANCE: f64 = 1e-8;

const DELTA_RANGE: i8 = 4;
const SAMPLE_CHUNK: usize = 8192;

/// Change statistics and plus-state indicators for a batch of tetrads.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TetradSample {
    deltas: Vec<i8>,
    labels: Vec<bool>,
}

impl TetradSample {
    pub fn new(deltas: Vec<i8>, labels: Vec<bool>) -> Result<Self> {
        if deltas.len() != labels.len() {
            return Err(Error::InvalidParameter(format!(
                "{} deltas but {} labels",
                deltas.len(),
                labels.len()
            )));
        }
        if let Some(d) = deltas.iter().find(|d| d.abs() > DELTA_RANGE) {
            return Err(Error::InvalidParameter(format!("change statistic {d} out of range")));
        }
        Ok(Self { deltas, labels })
    }

    /// Sample `n` tetrads uniformly from the valid tetrads of `net`. Draws run
    /// in fixed-size chunks, each on its own stream derived from one value
    /// taken from `rng`, so the result does not depend on the thread count.
    /// Returns an empty sample when the network admits no valid tetrad.
    pub fn from_network<R: Rng + ?Sized>(net: &Network, n: usize, rng: &mut R) -> Self {
        let base: u64 = rng.random();
        let sampler = TetradSampler::new(net);
        let infected = net.infection();
        let chunks: Vec<Option<Vec<(i8, bool)>>> = (0..n.div_ceil(SAMPLE_CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut r = rng::stream(base, &[c as u64]);
                let len = SAMPLE_CHUNK.min(n - c * SAMPLE_CHUNK);
                (0..len)
                    .map(|_| {
                        sampler
                            .sample(&mut r)
                            .map(|t| (t.delta(infected), t.is_plus()))
                    })
                    .collect()
            })
            .collect();
        let mut out = Self::default();
        for chunk in chunks {
            match chunk {
                Some(v) => {
                    for (d, l) in v {
                        out.deltas.push(d);
                        out.labels.push(l);
                    }
                }
                None => return Self::default(),
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }

    pub fn deltas(&self) -> &[i8] {
        &self.deltas
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn n_informative(&self) -> usize {
        self.deltas.iter().filter(|&&d| d != 0).count()
    }

    fn tally(&self) -> Tally {
        let mut counts = [[0u64; 2]; 9];
        for (&d, &l) in self.deltas.iter().zip(&self.labels) {
            counts[(d + DELTA_RANGE) as usize][l as usize] += 1;
        }
        Tally {
            counts,
            n: self.len() as f64,
        }
    }
}

/// Sufficient statistics: counts by (delta, label).
struct Tally {
    counts: [[u64; 2]; 9],
    n: f64,
}

impl Tally {
    fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.counts.iter().enumerate().flat_map(|(i, c)| {
            let d = i as f64 - DELTA_RANGE as f64;
            [(d, 0.0, c[0] as f64), (d, 1.0, c[1] as f64)]
                .into_iter()
                .filter(|&(_, _, w)| w > 0.0)
        })
    }

    fn loglik(&self, eta: f64) -> f64 {
        self.cells()
            .map(|(d, l, w)| w * (eta * d * l - softplus(eta * d)))
            .sum::<f64>()
            / self.n
    }

    fn score(&self, eta: f64) -> f64 {
        self.cells()
            .map(|(d, l, w)| w * d * (l - logistic(eta * d)))
            .sum::<f64>()
            / self.n
    }

    fn curvature(&self, eta: f64) -> f64 {
        -self
            .cells()
            .map(|(d, _, w)| {
                let p = logistic(eta * d);
                w * d * d * p * (1.0 - p)
            })
            .sum::<f64>()
            / self.n
    }

    /// Score in the limit eta -> +inf (sign = +1) or -inf (sign = -1).
    fn limit_score(&self, sign: f64) -> f64 {
        self.cells()
            .map(|(d, l, w)| {
                let p = if d * sign > 0.0 {
                    1.0
                } else if d * sign < 0.0 {
                    0.0
                } else {
                    0.5
                };
                w * d * (l - p)
            })
            .sum::<f64>()
            / self.n
    }
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn require_nonempty(sample: &TetradSample) -> Result<()> {
    if sample.is_empty() {
        Err(Error::Empty("tetrad sample"))
    } else {
        Ok(())
    }
}

/// Mean tetradic log pseudo-likelihood at `eta`.
pub fn tetradic_loglik(eta: f64, sample: &TetradSample) -> Result<f64> {
    require_nonempty(sample)?;
    Ok(sample.tally().loglik(eta))
}

/// Derivative of [`tetradic_loglik`] in `eta`.
pub fn tetradic_score(eta: f64, sample: &TetradSample) -> Result<f64> {
    require_nonempty(sample)?;
    Ok(sample.tally().score(eta))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MtpleFit {
    pub eta_hat: f64,
    pub loglik: f64,
    pub gradient_at_opt: f64,
    pub n_informative: usize,
    pub converged: bool,
    /// The maximizer lies at or beyond `±ETA_CAP`.
    pub capped: bool,
}

/// Maximize the tetradic pseudo-likelihood on `[-ETA_CAP, ETA_CAP]` by
/// safeguarded Newton iteration.
///
/// With no informative tetrads the objective is flat and `eta_hat = 0` with
/// `converged = false`. When the maximizer is at or beyond the cap (including
/// complete separation) the cap is returned with `capped = true`.
pub fn fit_mtple(sample: &TetradSample) -> MtpleFit {
    let n_informative = sample.n_informative();
    if n_informative == 0 {
        return MtpleFit {
            eta_hat: 0.0,
            loglik: -std::f64::consts::LN_2,
            gradient_at_opt: 0.0,
            n_informative,
            converged: false,
            capped: false,
        };
    }
    let tally = sample.tally();
    let capped = |eta: f64| MtpleFit {
        eta_hat: eta,
        loglik: tally.loglik(eta),
        gradient_at_opt: tally.score(eta),
        n_informative,
        converged: false,
        capped: true,
    };
    if tally.limit_score(1.0) >= 0.0 || tally.score(ETA_CAP) >= 0.0 {
        return capped(ETA_CAP);
    }
    if tally.limit_score(-1.0) <= 0.0 || tally.score(-ETA_CAP) <= 0.0 {
        return capped(-ETA_CAP);
    }

    let (mut lo, mut hi) = (-ETA_CAP, ETA_CAP);
    let mut eta = 0.0;
    let mut grad = tally.score(eta);
    let mut converged = grad.abs() < GRADIENT_TOLERANCE;
    for _ in 0..MAX_NEWTON_ITERATIONS {
        if converged {
            break;
        }
        if grad > 0.0 {
            lo = eta;
        } else {
            hi = eta;
        }
        let step = eta - grad / tally.curvature(eta);
        eta = if step.is_finite() && step > lo && step < hi {
            step
        } else {
            0.5 * (lo + hi)
        };
        grad = tally.score(eta);
        converged = grad.abs() < GRADIENT_TOLERANCE;
    }
    MtpleFit {
        eta_hat: eta,
        loglik: tally.loglik(eta),
        gradient_at_opt: grad,
        n_informative,
        converged,
        capped: false,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitOptions {
    pub tetrad_n: usize,
    pub anneal: AnnealSchedule,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            tetrad_n: 100_000,
            anneal: AnnealSchedule::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct NaturalFit {
    pub eta: f64,
    pub fit: MtpleFit,
    /// The constructed network whose tetrads were fitted.
    pub reference: Network,
    pub anneal: AnnealOutcome,
}

/// Map a target cross-tie count to the natural parameter of the model with the
/// degree and infection sequences of `table`: build a graph with those
/// sequences, anneal it to `target_g` cross ties, and fit on its tetrads.
pub fn mean_value_to_natural<R: Rng + ?Sized>(
    table: &ClassTable,
    target_g: f64,
    rng: &mut R,
    opts: &FitOptions,
) -> Result<NaturalFit> {
    if !(target_g.is_finite() && target_g >= 0.0) {
        return Err(Error::InvalidParameter(format!("target cross ties {target_g}")));
    }
    let (degrees, infected) = table.to_sequences()?;
    let start = reed_molloy(&degrees, &infected, rng)?;
    let anneal = anneal_to_crossties(&start, target_g, &opts.anneal, rng);
    let sample = TetradSample::from_network(&anneal.network, opts.tetrad_n, rng);
    let fit = fit_mtple(&sample);
    Ok(NaturalFit {
        eta: fit.eta_hat,
        fit,
        reference: anneal.network.clone(),
        anneal,
    })
}
