use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;

use crate::bootstrap::{parametric_bootstrap, BootstrapConfig};
use crate::error::{Error, Result};
use crate::estimate::{ma_estimate, naive_mean, vh_estimate, MaConfig};
use crate::netgen::{gen_bernoulli_mixing, solve_mixing_cells, MixingSpec};
use crate::rdssim::{run_rds, select_seeds, RdsSample, SamplingDesign, SeedMode};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Estimator {
    Mean,
    Vh,
    Ma,
}

impl Estimator {
    pub fn name(self) -> &'static str {
        match self {
            Estimator::Mean => "mean",
            Estimator::Vh => "vh",
            Estimator::Ma => "ma",
        }
    }
}

impl std::str::FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(Estimator::Mean),
            "vh" => Ok(Estimator::Vh),
            "ma" => Ok(Estimator::Ma),
            _ => Err(Error::InvalidParameter(format!("unknown estimator {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudySpec {
    pub networks: Vec<MixingSpec>,
    pub designs: Vec<SamplingDesign>,
    pub estimators: Vec<Estimator>,
    pub replications: usize,
    /// `pop_size` is overridden per cell unless `assumed_pop_size` is set.
    pub ma: MaConfig,
    pub assumed_pop_size: Option<usize>,
    pub bootstrap: Option<BootstrapConfig>,
    pub master_seed: u64,
}

impl Default for StudySpec {
    fn default() -> Self {
        let mut ma = MaConfig {
            m1: 10,
            m2: 10,
            offspring: crate::estimate::OffspringSource::Design,
            ..MaConfig::default()
        };
        ma.fit.tetrad_n = 20_000;
        Self {
            networks: vec![MixingSpec::default()],
            designs: vec![SamplingDesign::default()],
            estimators: vec![Estimator::Mean, Estimator::Vh, Estimator::Ma],
            replications: 200,
            ma,
            assumed_pop_size: None,
            bootstrap: None,
            master_seed: 1,
        }
    }
}

impl StudySpec {
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::InvalidParameter("replications must be positive".into()));
        }
        if self.networks.is_empty() || self.designs.is_empty() || self.estimators.is_empty() {
            return Err(Error::InvalidParameter("empty study grid".into()));
        }
        for d in &self.designs {
            d.validate()?;
        }
        self.ma.validate()?;
        if let Some(b) = &self.bootstrap {
            b.validate()?;
        }
        Ok(())
    }

    /// Cells in grid order: networks outer, designs inner.
    pub fn cells(&self) -> Vec<(MixingSpec, SamplingDesign)> {
        self.networks
            .iter()
            .flat_map(|n| self.designs.iter().map(move |d| (n.clone(), d.clone())))
            .collect()
    }

    fn levels(&self) -> Vec<f64> {
        self.bootstrap
            .as_ref()
            .map(|b| b.ci_levels.clone())
            .unwrap_or_default()
    }
}

/// Summary of one estimator over the replications of one cell.
#[derive(Clone, Debug, PartialEq)]
pub struct StudyRow {
    pub cell: usize,
    pub network: MixingSpec,
    pub design: SamplingDesign,
    pub estimator: Estimator,
    pub assumed_pop_size: usize,
    pub true_prevalence: f64,
    pub mean_estimate: f64,
    pub bias: f64,
    pub observed_se: f64,
    pub mean_bootstrap_se: Option<f64>,
    /// Coverage per configured interval level, in configuration order.
    pub coverage: Vec<(f64, f64)>,
    pub replications: usize,
    pub failures: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct StudyResult {
    pub rows: Vec<StudyRow>,
    /// Cells that could not be generated, with the reason.
    pub skipped: Vec<(usize, String)>,
    pub levels: Vec<f64>,
}

impl StudyResult {
    pub fn row(&self, cell: usize, estimator: Estimator) -> Option<&StudyRow> {
        self.rows
            .iter()
            .find(|r| r.cell == cell && r.estimator == estimator)
    }
}

/// One replicate's outcome for one estimator.
#[derive(Clone, Debug, Default)]
struct Draw {
    estimate: Option<f64>,
    boot_se: Option<f64>,
    covered: Vec<bool>,
}

struct Replicate {
    truth: f64,
    draws: Vec<Draw>,
}

/// The design the analyst assumes: the study design without referral bias.
fn analyst_template(design: &SamplingDesign) -> SamplingDesign {
    SamplingDesign {
        referral_weight_infected: 1.0,
        ..design.clone()
    }
}

fn draw_population(
    spec: &StudySpec,
    net_spec: &MixingSpec,
    design: &SamplingDesign,
    cell: usize,
    rep: usize,
) -> Result<(crate::netcore::Network, RdsSample)> {
    let path = |stage: u64| [cell as u64, rep as u64, stage];
    let net = gen_bernoulli_mixing(net_spec, &mut rng::stream(spec.master_seed, &path(0)))?;
    let mut r = rng::stream(spec.master_seed, &path(1));
    let seeds = select_seeds(&net, design, &mut r)?;
    let sample = run_rds(&net, design, &seeds, &mut r)?;
    Ok((net, sample))
}

fn ma_draw(
    spec: &StudySpec,
    sample: &RdsSample,
    design: &SamplingDesign,
    pop_size: usize,
    truth: f64,
    cell: usize,
    rep: usize,
) -> Draw {
    let path = |stage: u64| [cell as u64, rep as u64, stage];
    let template = analyst_template(design);
    let cfg = MaConfig {
        pop_size,
        ..spec.ma.clone()
    };
    let Ok(fit) = ma_estimate(sample, &template, &cfg, &mut rng::stream(spec.master_seed, &path(2))) else {
        return Draw::default();
    };
    let mut draw = Draw {
        estimate: Some(fit.mu_hat),
        ..Draw::default()
    };
    if let Some(bcfg) = &spec.bootstrap {
        if let Ok(b) = parametric_bootstrap(&fit, &template, bcfg, &cfg, &mut rng::stream(spec.master_seed, &path(3))) {
            draw.boot_se = Some(b.se);
            draw.covered = b.intervals.iter().map(|iv| iv.contains(truth)).collect();
        }
    }
    draw
}

fn summarize_cell(
    spec: &StudySpec,
    cell: usize,
    net: &MixingSpec,
    design: &SamplingDesign,
    estimator: Estimator,
    pop_size: usize,
    reps: &[(f64, &Draw)],
) -> StudyRow {
    let levels = spec.levels();
    let ok: Vec<(f64, &Draw)> = reps
        .iter()
        .filter(|(_, d)| d.estimate.is_some())
        .copied()
        .collect();
    let n = ok.len() as f64;
    let mean_of = |v: &mut dyn Iterator<Item = f64>| v.sum::<f64>() / n;
    let truth = mean_of(&mut ok.iter().map(|(t, _)| *t));
    let mean_estimate = mean_of(&mut ok.iter().map(|(_, d)| d.estimate.unwrap_or(0.0)));
    let observed_se = if ok.len() > 1 {
        (ok.iter()
            .map(|(_, d)| (d.estimate.unwrap_or(0.0) - mean_estimate).powi(2))
            .sum::<f64>()
            / (n - 1.0))
            .sqrt()
    } else {
        f64::NAN
    };
    let booted: Vec<&Draw> = ok.iter().map(|(_, d)| *d).filter(|d| d.boot_se.is_some()).collect();
    let mean_bootstrap_se = (!booted.is_empty())
        .then(|| booted.iter().filter_map(|d| d.boot_se).sum::<f64>() / booted.len() as f64);
    let coverage = if booted.is_empty() {
        Vec::new()
    } else {
        levels
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                let hits = booted.iter().filter(|d| d.covered[i]).count();
                (l, hits as f64 / booted.len() as f64)
            })
            .collect()
    };
    StudyRow {
        cell,
        network: net.clone(),
        design: design.clone(),
        estimator,
        assumed_pop_size: pop_size,
        true_prevalence: truth,
        mean_estimate,
        bias: mean_estimate - truth,
        observed_se,
        mean_bootstrap_se,
        coverage,
        replications: ok.len(),
        failures: reps.len() - ok.len(),
    }
}

/// Run every cell of the grid. Each replication generates a fresh population,
/// draws one RDS sample from it and applies every estimator. Replications run
/// in parallel on streams that depend only on the master seed, the cell index
/// and the replication index, so output does not depend on thread count.
pub fn run_study(spec: &StudySpec) -> Result<StudyResult> {
    spec.validate()?;
    let cells = spec.cells();
    let mut result = StudyResult {
        levels: spec.levels(),
        ..StudyResult::default()
    };
    let live: Vec<usize> = (0..cells.len())
        .filter(|&c| match solve_mixing_cells(&cells[c].0) {
            Ok(_) => true,
            Err(e) => {
                result.skipped.push((c, e.to_string()));
                false
            }
        })
        .collect();
    let tasks: Vec<(usize, usize)> = live
        .iter()
        .flat_map(|&c| (0..spec.replications).map(move |r| (c, r)))
        .collect();
    let outcomes: Vec<Option<Replicate>> = tasks
        .par_iter()
        .map(|&(c, r)| {
            let (net_spec, design) = &cells[c];
            let (net, sample) = draw_population(spec, net_spec, design, c, r).ok()?;
            let truth = net.prevalence();
            let pop_size = spec.assumed_pop_size.unwrap_or(net.node_count());
            let draws = spec
                .estimators
                .iter()
                .map(|e| match e {
                    Estimator::Mean => Draw {
                        estimate: naive_mean(&sample).ok(),
                        ..Draw::default()
                    },
                    Estimator::Vh => Draw {
                        estimate: vh_estimate(&sample).ok(),
                        ..Draw::default()
                    },
                    Estimator::Ma => ma_draw(spec, &sample, design, pop_size, truth, c, r),
                })
                .collect();
            Some(Replicate { truth, draws })
        })
        .collect();

    for &c in &live {
        let (net_spec, design) = &cells[c];
        let reps: Vec<&Option<Replicate>> = tasks
            .iter()
            .zip(&outcomes)
            .filter(|((tc, _), _)| *tc == c)
            .map(|(_, o)| o)
            .collect();
        let pop_size = spec.assumed_pop_size.unwrap_or(net_spec.node_count);
        for (ei, &e) in spec.estimators.iter().enumerate() {
            let missing = Draw::default();
            let per_rep: Vec<(f64, &Draw)> = reps
                .iter()
                .map(|o| match o {
                    Some(rep) => (rep.truth, &rep.draws[ei]),
                    None => (net_spec.realized_prevalence(), &missing),
                })
                .collect();
            result
                .rows
                .push(summarize_cell(spec, c, net_spec, design, e, pop_size, &per_rep));
        }
    }
    Ok(result)
}

/// Apply the model-assisted estimator at each assumed population size to the
/// same populations and samples. Rows come out per cell and size, in the
/// order given.
pub fn run_sensitivity_n(spec: &StudySpec, pop_sizes: &[usize]) -> Result<StudyResult> {
    spec.validate()?;
    if pop_sizes.is_empty() {
        return Err(Error::InvalidParameter("no population sizes given".into()));
    }
    let cells = spec.cells();
    for (_, d) in &cells {
        if let Some(&p) = pop_sizes.iter().find(|&&p| p < d.n) {
            return Err(Error::SampleExceedsPopulation {
                sampled: d.n,
                pop_size: p,
            });
        }
    }
    let mut result = StudyResult {
        levels: spec.levels(),
        ..StudyResult::default()
    };
    let live: Vec<usize> = (0..cells.len())
        .filter(|&c| match solve_mixing_cells(&cells[c].0) {
            Ok(_) => true,
            Err(e) => {
                result.skipped.push((c, e.to_string()));
                false
            }
        })
        .collect();
    let tasks: Vec<(usize, usize)> = live
        .iter()
        .flat_map(|&c| (0..spec.replications).map(move |r| (c, r)))
        .collect();
    let outcomes: Vec<Option<(f64, Vec<Draw>)>> = tasks
        .par_iter()
        .map(|&(c, r)| {
            let (net_spec, design) = &cells[c];
            let (net, sample) = draw_population(spec, net_spec, design, c, r).ok()?;
            let truth = net.prevalence();
            let draws = pop_sizes
                .iter()
                .map(|&p| ma_draw(spec, &sample, design, p, truth, c, r))
                .collect();
            Some((truth, draws))
        })
        .collect();
    for &c in &live {
        let (net_spec, design) = &cells[c];
        let reps: Vec<&Option<(f64, Vec<Draw>)>> = tasks
            .iter()
            .zip(&outcomes)
            .filter(|((tc, _), _)| *tc == c)
            .map(|(_, o)| o)
            .collect();
        for (pi, &p) in pop_sizes.iter().enumerate() {
            let missing = Draw::default();
            let per_rep: Vec<(f64, &Draw)> = reps
                .iter()
                .map(|o| match o {
                    Some((t, d)) => (*t, &d[pi]),
                    None => (net_spec.realized_prevalence(), &missing),
                })
                .collect();
            result
                .rows
                .push(summarize_cell(spec, c, net_spec, design, Estimator::Ma, p, &per_rep));
        }
    }
    Ok(result)
}

/// The sample each replication of a cell would draw; exposed so callers can
/// check that runs share populations.
pub fn replicate_sample(spec: &StudySpec, cell: usize, rep: usize) -> Result<RdsSample> {
    let cells = spec.cells();
    let (net_spec, design) = cells
        .get(cell)
        .ok_or_else(|| Error::InvalidParameter(format!("no cell {cell}")))?;
    draw_population(spec, net_spec, design, cell, rep).map(|(_, s)| s)
}

fn seed_mode_name(mode: &SeedMode) -> String {
    match mode {
        SeedMode::PpsDegreeAll => "pps_degree_all".into(),
        SeedMode::PpsDegreeInfectedOnly => "pps_degree_infected_only".into(),
        SeedMode::MatchClasses(c) => {
            let mut s = String::from("match_classes");
            for k in c {
                let _ = write!(s, ";{}:{}", k.degree, u8::from(k.infected));
            }
            s
        }
    }
}

fn fixed(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:.6}")
    }
}

/// CSV with one row per (cell, estimator). Floats use six decimals; values
/// that do not apply are left blank.
pub fn write_study_csv<W: Write>(result: &StudyResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = [
        "cell",
        "N",
        "prevalence",
        "mean_degree",
        "homophily_R",
        "activity_w",
        "n",
        "n_seeds",
        "seed_mode",
        "referral_weight",
        "estimator",
        "assumed_N",
        "true_prevalence",
        "mean_estimate",
        "bias",
        "observed_se",
        "mean_bootstrap_se",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for l in &result.levels {
        header.push(format!("coverage_{}", (l * 100.0).round()));
    }
    header.push("replications".into());
    header.push("failures".into());
    w.write_record(&header)?;
    for r in &result.rows {
        let mut rec = vec![
            r.cell.to_string(),
            r.network.node_count.to_string(),
            fixed(r.network.prevalence),
            fixed(r.network.mean_degree),
            fixed(r.network.homophily_r),
            fixed(r.network.activity_w),
            r.design.n.to_string(),
            r.design.n_seeds.to_string(),
            seed_mode_name(&r.design.seed_mode),
            fixed(r.design.referral_weight_infected),
            r.estimator.name().to_string(),
            r.assumed_pop_size.to_string(),
            fixed(r.true_prevalence),
            fixed(r.mean_estimate),
            fixed(r.bias),
            fixed(r.observed_se),
            r.mean_bootstrap_se.map(fixed).unwrap_or_default(),
        ];
        for (i, _) in result.levels.iter().enumerate() {
            rec.push(r.coverage.get(i).map(|c| fixed(c.1)).unwrap_or_default());
        }
        rec.push(r.replications.to_string());
        rec.push(r.failures.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Cells skipped as infeasible, as `cell,reason` CSV.
pub fn write_skipped_csv<W: Write>(result: &StudyResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["cell", "reason"])?;
    for (c, why) in &result.skipped {
        w.write_record([c.to_string(), why.clone()])?;
    }
    w.flush()?;
    Ok(())
}
