//! Parametric bootstrap for the model-assisted estimator.
//!
//! Each replicate simulates a population network from the fitted working
//! model, draws one RDS sample with the matched design, and re-estimates
//! prevalence either with the full estimator or, in fast mode, by reweighting
//! the replicate with the fitted class probabilities.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::estimate::{chain_draws, hajek_by, ma_estimate, MaConfig, MaResult};
use crate::netcore::Network;
use crate::rdssim::{run_rds, select_seeds, SamplingDesign};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BootstrapMode {
    /// Re-run the whole estimator on every replicate.
    Full,
    /// Reuse the fitted class weights.
    Fast,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BootstrapConfig {
    pub replicates: usize,
    pub mode: BootstrapMode,
    pub ci_levels: Vec<f64>,
    /// Replicate networks drawn per chain; each chain gets its own burn-in.
    pub chain_block: usize,
    /// Also report percentile intervals.
    pub percentile: bool,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            replicates: 1000,
            mode: BootstrapMode::Fast,
            ci_levels: vec![0.95, 0.90],
            chain_block: 25,
            percentile: false,
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicates < 2 {
            return Err(Error::InvalidParameter("need at least 2 bootstrap replicates".into()));
        }
        if self.chain_block == 0 {
            return Err(Error::InvalidParameter("chain block must be positive".into()));
        }
        check_levels(&self.ci_levels)
    }
}

fn check_levels(levels: &[f64]) -> Result<()> {
    match levels.iter().find(|l| !(**l > 0.0 && **l < 1.0)) {
        Some(l) => Err(Error::InvalidParameter(format!("interval level {l}"))),
        None => Ok(()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub level: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BootstrapResult {
    pub mu_hat: f64,
    /// Successful replicate estimates in replicate order.
    pub draws: Vec<f64>,
    pub se: f64,
    pub intervals: Vec<Interval>,
    pub percentile_intervals: Option<Vec<Interval>>,
    /// Replicates that failed twice and were dropped.
    pub failures: usize,
}

/// Standard deviation of the draws and normal-theory intervals
/// `mu_hat ± z * se`, truncated to `[0, 1]`.
pub fn summarize(draws: &[f64], mu_hat: f64, levels: &[f64]) -> Result<(f64, Vec<Interval>)> {
    if draws.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "{} bootstrap draws, need at least 2",
            draws.len()
        )));
    }
    check_levels(levels)?;
    let n = draws.len() as f64;
    // Shifted by the first draw so identical draws give exactly zero.
    let shift = draws[0];
    let sum: f64 = draws.iter().map(|d| d - shift).sum();
    let mean = sum / n;
    let var = draws.iter().map(|d| (d - shift - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let se = var.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let intervals = levels
        .iter()
        .map(|&level| {
            let z = normal.inverse_cdf(0.5 + level / 2.0);
            Interval {
                level,
                lower: (mu_hat - z * se).clamp(0.0, 1.0),
                upper: (mu_hat + z * se).clamp(0.0, 1.0),
            }
        })
        .collect();
    Ok((se, intervals))
}

/// Equal-tailed percentile intervals with linear interpolation between order
/// statistics.
pub fn percentile_intervals(draws: &[f64], levels: &[f64]) -> Result<Vec<Interval>> {
    if draws.is_empty() {
        return Err(Error::Empty("bootstrap draws"));
    }
    check_levels(levels)?;
    let mut sorted = draws.to_vec();
    sorted.sort_by(f64::total_cmp);
    let quantile = |p: f64| {
        let h = p * (sorted.len() - 1) as f64;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    };
    Ok(levels
        .iter()
        .map(|&level| Interval {
            level,
            lower: quantile(0.5 - level / 2.0),
            upper: quantile(0.5 + level / 2.0),
        })
        .collect())
}

/// The sampling design used for replicate samples: the fitted matched design
/// with the template's referral weight and die-out handling.
pub fn replicate_design(fit: &MaResult, template: &SamplingDesign) -> SamplingDesign {
    SamplingDesign {
        referral_weight_infected: template.referral_weight_infected,
        reseed_on_dieout: template.reseed_on_dieout,
        ..fit.design.clone()
    }
}

fn replicate_networks(fit: &MaResult, ma_cfg: &MaConfig, cfg: &BootstrapConfig, base: u64) -> Vec<Network> {
    let blocks = cfg.replicates.div_ceil(cfg.chain_block);
    let nets: Vec<Vec<Network>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let count = cfg.chain_block.min(cfg.replicates - b * cfg.chain_block);
            let mut r = rng::stream(base, &[0, b as u64]);
            chain_draws(&fit.reference, fit.eta_hat(), count, &ma_cfg.mcmc, &mut r).0
        })
        .collect();
    nets.into_iter().flatten().collect()
}

/// Parametric bootstrap around `fit`. Replicate networks come from chains at
/// the fitted parameter started at the fitted reference network, `chain_block`
/// networks per chain. A replicate that errors is retried once on a fresh
/// stream and otherwise dropped and counted in `failures`.
pub fn parametric_bootstrap<R: Rng + ?Sized>(
    fit: &MaResult,
    template: &SamplingDesign,
    cfg: &BootstrapConfig,
    ma_cfg: &MaConfig,
    rng: &mut R,
) -> Result<BootstrapResult> {
    cfg.validate()?;
    let base: u64 = rng.random();
    let design = replicate_design(fit, template);
    let nets = replicate_networks(fit, ma_cfg, cfg, base);
    let one = |net: &Network, b: usize, attempt: u64| -> Result<f64> {
        let mut r = rng::stream(base, &[1, b as u64, attempt]);
        let seeds = select_seeds(net, &design, &mut r)?;
        let sample = run_rds(net, &design, &seeds, &mut r)?;
        match cfg.mode {
            BootstrapMode::Fast => hajek_by(&sample.records, |rec| {
                fit.weights.nearest(rec.class()).ok_or(Error::MissingWeight(rec.class()))
            }),
            BootstrapMode::Full => Ok(ma_estimate(&sample, template, ma_cfg, &mut r)?.mu_hat),
        }
    };
    let results: Vec<Option<f64>> = nets
        .par_iter()
        .enumerate()
        .map(|(b, net)| one(net, b, 0).or_else(|_| one(net, b, 1)).ok())
        .collect();
    let failures = results.iter().filter(|r| r.is_none()).count();
    let draws: Vec<f64> = results.into_iter().flatten().collect();
    let (se, intervals) = summarize(&draws, fit.mu_hat, &cfg.ci_levels)?;
    let percentile_intervals = if cfg.percentile {
        Some(percentile_intervals(&draws, &cfg.ci_levels)?)
    } else {
        None
    };
    Ok(BootstrapResult {
        mu_hat: fit.mu_hat,
        draws,
        se,
        intervals,
        percentile_intervals,
        failures,
    })
}

pub fn write_draws_to<W: Write>(result: &BootstrapResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["replicate", "estimate"])?;
    for (i, d) in result.draws.iter().enumerate() {
        w.write_record([i.to_string(), d.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_to<W: Write>(result: &BootstrapResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["mu_hat", "se", "kind", "level", "lower", "upper", "failures"])?;
    let kinds = std::iter::once(("normal", &result.intervals))
        .chain(result.percentile_intervals.iter().map(|p| ("percentile", p)));
    for (kind, intervals) in kinds {
        for iv in intervals {
            w.write_record([
                result.mu_hat.to_string(),
                result.se.to_string(),
                kind.to_string(),
                iv.level.to_string(),
                iv.lower.to_string(),
                iv.upper.to_string(),
                result.failures.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
