use std::collections::BTreeMap;

use rand::Rng;

use crate::ergmfit::{mean_value_to_natural, FitOptions};
use crate::error::{Error, Result};
use crate::netcore::{ClassKey, ClassTable, Network, TableScale};
use crate::netgen::{ErgmChain, McmcOptions};
use crate::rdssim::{infected_alters, simulate_class_counts, ClassCounts, Coupons, RdsSample, SamplingDesign, SeedMode};
use crate::rng;

use super::basic::hajek;
use super::weights::WeightTable;

/// Starting weights `pi_k = (k / N) * sum_j 1 / d_j`, capped at 1.
pub fn initial_weights(sample: &RdsSample, pop_size: usize) -> Result<WeightTable> {
    check_population(sample, pop_size)?;
    let mut inv = 0.0;
    for r in &sample.records {
        if r.degree == 0 {
            return Err(Error::ZeroDegree(r.id));
        }
        inv += 1.0 / f64::from(r.degree);
    }
    let mut w = WeightTable::new(0);
    for key in sample.class_counts().into_keys() {
        let pi = f64::from(key.degree) / pop_size as f64 * inv;
        w.set(key, pi.min(1.0))?;
    }
    Ok(w)
}

fn check_population(sample: &RdsSample, pop_size: usize) -> Result<()> {
    if sample.is_empty() {
        return Err(Error::Empty("sample"));
    }
    if sample.len() > pop_size {
        return Err(Error::SampleExceedsPopulation {
            sampled: sample.len(),
            pop_size,
        });
    }
    Ok(())
}

/// Weighted estimates of the class proportions and of the cross-tie count.
///
/// `infected_alters` holds each respondent's number of infected alters. With
/// `hajek_normalized` the class proportions are divided by the weight total
/// instead of `pop_size`.
pub fn design_estimates_with(
    sample: &RdsSample,
    infected_alters: &[f64],
    weights: &WeightTable,
    pop_size: usize,
    hajek_normalized: bool,
) -> Result<(ClassTable, f64)> {
    check_population(sample, pop_size)?;
    if infected_alters.len() != sample.len() {
        return Err(Error::SequenceMismatch);
    }
    let mut table = ClassTable::new(TableScale::Estimated);
    let mut g = 0.0;
    let mut weight_total = 0.0;
    for (r, &x) in sample.records.iter().zip(infected_alters) {
        let inv = 1.0 / weights.require(r.class())?;
        table.add(r.class(), inv)?;
        weight_total += inv;
        let d = f64::from(r.degree);
        let cross = if r.infected { d - x } else { x };
        g += cross * inv / 2.0;
    }
    let denom = if hajek_normalized { weight_total } else { pop_size as f64 };
    let mut scaled = ClassTable::new(TableScale::Estimated);
    for (k, v) in table.iter() {
        scaled.set(k, v / denom)?;
    }
    Ok((scaled, g.max(0.0)))
}

/// [`design_estimates_with`] using observed infected-alter counts, estimated
/// from referrals where missing.
pub fn design_estimates(sample: &RdsSample, weights: &WeightTable, pop_size: usize) -> Result<(ClassTable, f64)> {
    let x = infected_alters(sample)?;
    design_estimates_with(sample, &x, weights, pop_size, false)
}

/// Turn estimated class proportions into integer class counts for a
/// population of `pop_size`.
///
/// Proportions are rescaled to sum to `pop_size` and rounded by largest
/// remainder (ties to the earlier class). Classes then get at least as many
/// nodes as were sampled from them, taking the difference one node at a time
/// from the class with the largest surplus. An odd degree total is fixed by
/// moving one node, chosen uniformly among surplus nodes, from degree `k` to
/// `k + 1`.
pub fn realize_population<R: Rng + ?Sized>(
    table: &ClassTable,
    pop_size: usize,
    sample_counts: &BTreeMap<ClassKey, u64>,
    rng: &mut R,
) -> Result<ClassTable> {
    let sampled: u64 = sample_counts.values().sum();
    if sampled > pop_size as u64 {
        return Err(Error::SampleExceedsPopulation {
            sampled: sampled as usize,
            pop_size,
        });
    }
    let total = table.total();
    if !(total > 0.0) {
        return Err(Error::Empty("estimated class table"));
    }
    let mut keys: Vec<ClassKey> = table.classes().chain(sample_counts.keys().copied()).collect();
    keys.sort();
    keys.dedup();

    let n = pop_size as f64;
    let scaled: Vec<f64> = keys.iter().map(|&k| table.get(k) * n / total).collect();
    let mut counts: Vec<u64> = scaled.iter().map(|s| s.floor() as u64).collect();
    let assigned: u64 = counts.iter().sum();
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = scaled[a] - scaled[a].floor();
        let fb = scaled[b] - scaled[b].floor();
        fb.total_cmp(&fa)
    });
    for &i in order.iter().take((pop_size as u64).saturating_sub(assigned) as usize) {
        counts[i] += 1;
    }

    let mins: Vec<u64> = keys
        .iter()
        .map(|k| sample_counts.get(k).copied().unwrap_or(0))
        .collect();
    let mut deficit = 0;
    for (c, &m) in counts.iter_mut().zip(&mins) {
        if *c < m {
            deficit += m - *c;
            *c = m;
        }
    }
    for _ in 0..deficit {
        let donor = (0..keys.len())
            .max_by_key(|&i| (counts[i] - mins[i], std::cmp::Reverse(i)))
            .expect("classes exist");
        if counts[donor] == mins[donor] {
            return Err(Error::Invariant("no surplus left to cover sampled classes".into()));
        }
        counts[donor] -= 1;
    }

    let mut out: BTreeMap<ClassKey, u64> = keys.iter().copied().zip(counts.iter().copied()).collect();
    let degree_total: u64 = out.iter().map(|(k, c)| u64::from(k.degree) * c).sum();
    if degree_total % 2 == 1 {
        let surplus: Vec<u64> = counts.iter().zip(&mins).map(|(c, m)| c - m).collect();
        let pool = if surplus.iter().any(|&s| s > 0) { &surplus } else { &counts };
        let mut u = rng.random_range(0..pool.iter().sum::<u64>());
        let mut pick = 0;
        for (i, &s) in pool.iter().enumerate() {
            if u < s {
                pick = i;
                break;
            }
            u -= s;
        }
        let from = keys[pick];
        *out.get_mut(&from).expect("present") -= 1;
        *out.entry(ClassKey::new(from.degree + 1, from.infected)).or_default() += 1;
    }
    Ok(ClassTable::from_counts(out))
}

/// Smoothed inclusion probabilities `(U + 1) / (M * count + 1)` for every
/// class of the realized population.
pub fn update_weights(counts: &ClassCounts, realized: &ClassTable, iteration: usize) -> Result<WeightTable> {
    let mut w = WeightTable::new(iteration);
    for key in realized.classes() {
        let size = realized.count(key);
        if size == 0 {
            return Err(Error::EmptyRealizedClass(key));
        }
        let pi = (counts.get(key) + 1) as f64 / (counts.m * size + 1) as f64;
        if pi > 1.0 {
            return Err(Error::Invariant(format!(
                "class {key} sampled {} times in {} samples of {size} nodes",
                counts.get(key),
                counts.m
            )));
        }
        w.set(key, pi)?;
    }
    Ok(w)
}

/// Where the simulated samples inside the estimator get their coupon rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OffspringSource {
    /// Use the coupons of the design template as given.
    Design,
    /// Observed offspring distribution by infection status, pooled over waves.
    Pooled,
    /// Observed offspring distribution by wave and infection status.
    ByWave,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaConfig {
    pub iterations: usize,
    pub m1: usize,
    pub m2: usize,
    /// Assumed population size.
    pub pop_size: usize,
    pub fit: FitOptions,
    pub mcmc: McmcOptions,
    pub offspring: OffspringSource,
    /// Divide class-size estimates by the weight total instead of `pop_size`.
    pub hajek_class_table: bool,
}

impl Default for MaConfig {
    fn default() -> Self {
        Self {
            iterations: 3,
            m1: 25,
            m2: 20,
            pop_size: 1000,
            fit: FitOptions::default(),
            mcmc: McmcOptions::default(),
            offspring: OffspringSource::Pooled,
            hajek_class_table: false,
        }
    }
}

impl MaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 || self.m1 == 0 || self.m2 == 0 {
            return Err(Error::InvalidParameter(
                "iterations, networks and samples per network must be positive".into(),
            ));
        }
        if self.fit.tetrad_n == 0 {
            return Err(Error::InvalidParameter("tetrad sample size must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationDiagnostics {
    pub iteration: usize,
    pub eta: f64,
    pub eta_capped: bool,
    pub g_tilde: f64,
    pub anneal_residual: f64,
    pub mcmc_acceptance: f64,
    /// Share of simulated samples that ended short of the target size.
    pub short_rate: f64,
}

#[derive(Clone, Debug)]
pub struct MaResult {
    pub mu_hat: f64,
    pub weights: WeightTable,
    pub eta_path: Vec<f64>,
    pub g_tilde_path: Vec<f64>,
    /// Integer population of the final iteration.
    pub realized_table: ClassTable,
    /// Network the final iteration's chain started from.
    pub reference: Network,
    /// Design used for the simulated samples.
    pub design: SamplingDesign,
    pub diagnostics: Vec<IterationDiagnostics>,
}

impl MaResult {
    pub fn eta_hat(&self) -> f64 {
        self.eta_path.last().copied().unwrap_or(0.0)
    }
}

/// The design the estimator simulates: the template with the observed sample
/// size, seeds matched to the observed seed classes, no replacement seeds, and
/// coupons chosen by `source`.
pub fn matched_design(sample: &RdsSample, template: &SamplingDesign, source: OffspringSource) -> Result<SamplingDesign> {
    let seeds = sample.seed_classes();
    let coupons = match source {
        OffspringSource::Design => template.coupons.clone(),
        OffspringSource::Pooled => Coupons::Offspring(sample.empirical_offspring(false)?),
        OffspringSource::ByWave => Coupons::Offspring(sample.empirical_offspring(true)?),
    };
    Ok(SamplingDesign {
        n: sample.len(),
        n_seeds: seeds.len(),
        seed_mode: SeedMode::MatchClasses(seeds),
        coupons,
        referral_weight_infected: template.referral_weight_infected,
        reseed_on_dieout: false,
    })
}

/// Draw `count` networks from one chain at `eta` started at `start`, after
/// the configured burn-in and with the configured spacing.
pub(crate) fn chain_draws<R: Rng + ?Sized>(
    start: &Network,
    eta: f64,
    count: usize,
    opts: &McmcOptions,
    rng: &mut R,
) -> (Vec<Network>, f64) {
    let mut chain = ErgmChain::new(start, eta);
    let e = chain.edge_count();
    chain.advance(opts.burn_in(e), rng);
    let mut nets = Vec::with_capacity(count);
    for _ in 0..count {
        chain.advance(opts.spacing(e), rng);
        nets.push(chain.snapshot());
    }
    (nets, chain.acceptance_rate())
}

/// Model-assisted prevalence estimate.
///
/// Starting from degree-proportional weights, each iteration estimates the
/// class sizes and cross-tie count, fits the working model to them, simulates
/// `m1` networks and `m2` samples per network with the observed design, and
/// re-estimates class inclusion probabilities from how often each class was
/// sampled. The result weights the observed sample with the final
/// probabilities. Errors carry the iteration they occurred in.
pub fn ma_estimate<R: Rng + ?Sized>(
    sample: &RdsSample,
    template: &SamplingDesign,
    cfg: &MaConfig,
    rng: &mut R,
) -> Result<MaResult> {
    cfg.validate()?;
    let design = matched_design(sample, template, cfg.offspring)?;
    let x = infected_alters(sample)?;
    let sample_counts = sample.class_counts();
    let base: u64 = rng.random();

    let mut weights = initial_weights(sample, cfg.pop_size)?;
    let mut eta_path = Vec::with_capacity(cfg.iterations);
    let mut g_tilde_path = Vec::with_capacity(cfg.iterations);
    let mut diagnostics = Vec::with_capacity(cfg.iterations);
    let mut last = None;
    for it in 1..=cfg.iterations {
        let step = || -> Result<_> {
            let (table, g_tilde) =
                design_estimates_with(sample, &x, &weights, cfg.pop_size, cfg.hajek_class_table)?;
            let realized = realize_population(&table, cfg.pop_size, &sample_counts, &mut rng::stream(base, &[it as u64, 0]))?;
            let nf = mean_value_to_natural(&realized, g_tilde, &mut rng::stream(base, &[it as u64, 1]), &cfg.fit)?;
            let (nets, acceptance) = chain_draws(&nf.reference, nf.eta, cfg.m1, &cfg.mcmc, &mut rng::stream(base, &[it as u64, 2]));
            let counts = simulate_class_counts(&nets, &design, cfg.m2, &mut rng::stream(base, &[it as u64, 3]))?;
            let new_weights = update_weights(&counts, &realized, it)?;
            let diag = IterationDiagnostics {
                iteration: it,
                eta: nf.eta,
                eta_capped: nf.fit.capped,
                g_tilde,
                anneal_residual: nf.anneal.residual,
                mcmc_acceptance: acceptance,
                short_rate: counts.short_rate(),
            };
            Ok((new_weights, realized, nf.reference, diag))
        };
        let (new_weights, realized, reference, diag) = step().map_err(|e| e.at_iteration(it))?;
        eta_path.push(diag.eta);
        g_tilde_path.push(diag.g_tilde);
        diagnostics.push(diag);
        weights = new_weights;
        last = Some((realized, reference));
    }
    let (realized_table, reference) = last.expect("at least one iteration");
    Ok(MaResult {
        mu_hat: hajek(sample, &weights)?,
        weights,
        eta_path,
        g_tilde_path,
        realized_table,
        reference,
        design,
        diagnostics,
    })
}
