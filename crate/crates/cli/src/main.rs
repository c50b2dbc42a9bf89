use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use rdsma::bootstrap::{parametric_bootstrap, write_draws_to, write_summary_to, BootstrapConfig, BootstrapMode};
use rdsma::estimate::io::{write_diagnostics_to, write_estimates_to, write_weights_to};
use rdsma::estimate::{ma_estimate, naive_mean, vh_estimate, MaConfig, OffspringSource};
use rdsma::harness::{read_study_config, run_sensitivity_n, run_study, write_skipped_csv, write_study_csv, Estimator};
use rdsma::netcore::io::{read_network, write_network};
use rdsma::netcore::mixing_and_ratios;
use rdsma::netgen::{gen_bernoulli_mixing, MixingSpec};
use rdsma::rdssim::io::{read_sample, write_sample_to};
use rdsma::rdssim::{run_rds, select_seeds, Coupons, RdsSample, SamplingDesign, SeedMode};
use rdsma::rng::stream;

#[derive(Parser)]
#[command(name = "rdsma", version, about = "Model-assisted prevalence estimation for RDS samples")]
struct Cli {
    /// Master seed; every random stream is derived from it. Defaults to 1,
    /// or to `study.seed` for `study`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores). Results do not depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Output file, or directory for gen-net. CSV goes to stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

impl Cli {
    fn seed(&self) -> u64 {
        self.seed.unwrap_or(1)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a population network (writes nodes.csv and edges.csv).
    GenNet(GenNetArgs),
    /// Draw an RDS sample from a network.
    Sample(SampleArgs),
    /// Point estimates of prevalence from an RDS sample.
    Estimate(EstimateArgs),
    /// Parametric bootstrap around the model-assisted estimate.
    Bootstrap(BootstrapArgs),
    /// Run a simulation study described by a config file.
    Study(StudyArgs),
}

#[derive(Args)]
struct GenNetArgs {
    #[arg(long = "N", default_value_t = 1000)]
    node_count: usize,
    #[arg(long, default_value_t = 0.2)]
    prevalence: f64,
    #[arg(long, default_value_t = 7.0)]
    mean_degree: f64,
    #[arg(long = "homophily-R", default_value_t = 5.0)]
    homophily_r: f64,
    #[arg(long = "activity-w", default_value_t = 1.0)]
    activity_w: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeedChoice {
    /// Proportional to degree among all nodes.
    Pps,
    /// Proportional to degree among infected nodes.
    Infected,
}

#[derive(Args)]
struct SampleArgs {
    /// Directory holding nodes.csv and edges.csv.
    #[arg(long)]
    net: PathBuf,
    #[arg(long, default_value_t = 500)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    seeds: usize,
    #[arg(long, value_enum, default_value_t = SeedChoice::Pps)]
    seed_mode: SeedChoice,
    #[arg(long, default_value_t = 2)]
    coupons: u32,
    /// Relative chance an infected alter is recruited.
    #[arg(long, default_value_t = 1.0)]
    referral_weight: f64,
    /// Let the sample end early instead of drawing a new seed on die-out.
    #[arg(long)]
    no_reseed: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EstimatorArg {
    Mean,
    Vh,
    Ma,
}

#[derive(Clone, Copy, ValueEnum)]
enum OffspringArg {
    Design,
    Pooled,
    ByWave,
}

#[derive(Args)]
struct MaArgs {
    /// RDS sample CSV.
    #[arg(long)]
    sample: PathBuf,
    /// Assumed population size.
    #[arg(long)]
    pop_size: usize,
    #[arg(long, default_value_t = 3)]
    ma_iters: usize,
    /// Networks drawn per iteration.
    #[arg(long, default_value_t = 25)]
    m1: usize,
    /// Samples drawn per network.
    #[arg(long, default_value_t = 20)]
    m2: usize,
    #[arg(long, default_value_t = 100_000)]
    tetrad_n: usize,
    /// Coupons per respondent in the assumed design.
    #[arg(long, default_value_t = 2)]
    coupons: u32,
    /// Recruitment rule for simulated samples.
    #[arg(long, value_enum, default_value_t = OffspringArg::Pooled)]
    offspring: OffspringArg,
}

impl MaArgs {
    fn config(&self) -> MaConfig {
        let mut cfg = MaConfig {
            iterations: self.ma_iters,
            m1: self.m1,
            m2: self.m2,
            pop_size: self.pop_size,
            offspring: match self.offspring {
                OffspringArg::Design => OffspringSource::Design,
                OffspringArg::Pooled => OffspringSource::Pooled,
                OffspringArg::ByWave => OffspringSource::ByWave,
            },
            ..MaConfig::default()
        };
        cfg.fit.tetrad_n = self.tetrad_n;
        cfg
    }

    fn template(&self) -> SamplingDesign {
        SamplingDesign {
            coupons: Coupons::Fixed(self.coupons),
            ..SamplingDesign::default()
        }
    }
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    ma: MaArgs,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [EstimatorArg::Mean, EstimatorArg::Vh, EstimatorArg::Ma])]
    estimator: Vec<EstimatorArg>,
    /// Also write the final class weights here.
    #[arg(long)]
    weights_out: Option<PathBuf>,
    /// Also write per-iteration diagnostics here.
    #[arg(long)]
    diagnostics_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Full,
    Fast,
}

#[derive(Args)]
struct BootstrapArgs {
    #[command(flatten)]
    ma: MaArgs,
    /// Bootstrap replicates.
    #[arg(long = "B", default_value_t = 1000)]
    replicates: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Fast)]
    mode: ModeArg,
    #[arg(long, value_delimiter = ',', default_values_t = [0.95, 0.90])]
    levels: Vec<f64>,
    /// Add percentile intervals to the summary.
    #[arg(long)]
    percentile: bool,
    /// Also write the replicate estimates here.
    #[arg(long)]
    draws_out: Option<PathBuf>,
}

#[derive(Args)]
struct StudyArgs {
    /// Study config file.
    config: PathBuf,
    /// Where to list cells that could not be generated.
    #[arg(long)]
    skipped_out: Option<PathBuf>,
    /// Where to write the population-size sensitivity table, if configured.
    #[arg(long)]
    sensitivity_out: Option<PathBuf>,
}

fn writer(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load_sample(path: &Path) -> Result<RdsSample> {
    read_sample(path).with_context(|| format!("reading sample {}", path.display()))
}

fn gen_net(cli: &Cli, args: &GenNetArgs) -> Result<()> {
    let Some(dir) = &cli.out else {
        bail!("gen-net needs --out <dir>");
    };
    let spec = MixingSpec {
        node_count: args.node_count,
        prevalence: args.prevalence,
        mean_degree: args.mean_degree,
        homophily_r: args.homophily_r,
        activity_w: args.activity_w,
    };
    let net = gen_bernoulli_mixing(&spec, &mut stream(cli.seed(), &[0]))?;
    std::fs::create_dir_all(dir)?;
    write_network(&net, dir)?;
    let st = mixing_and_ratios(&net)?;
    eprintln!(
        "{} nodes, {} edges, mean degree {:.3}, R {:.3}, w {:.3}",
        net.node_count(),
        net.edge_count(),
        st.mean_degree,
        st.homophily_r,
        st.activity_w
    );
    Ok(())
}

fn sample(cli: &Cli, args: &SampleArgs) -> Result<()> {
    let net = read_network(&args.net).with_context(|| format!("reading network {}", args.net.display()))?;
    let design = SamplingDesign {
        n: args.n,
        n_seeds: args.seeds,
        seed_mode: match args.seed_mode {
            SeedChoice::Pps => SeedMode::PpsDegreeAll,
            SeedChoice::Infected => SeedMode::PpsDegreeInfectedOnly,
        },
        coupons: Coupons::Fixed(args.coupons),
        referral_weight_infected: args.referral_weight,
        reseed_on_dieout: !args.no_reseed,
    };
    let mut r = stream(cli.seed(), &[1]);
    let seeds = select_seeds(&net, &design, &mut r)?;
    let s = run_rds(&net, &design, &seeds, &mut r)?;
    if s.died_out {
        eprintln!("sample died out at {} respondents", s.len());
    }
    write_sample_to(&s, writer(cli.out.as_deref())?)?;
    Ok(())
}

fn estimate(cli: &Cli, args: &EstimateArgs) -> Result<()> {
    let s = load_sample(&args.ma.sample)?;
    let mut rows: Vec<(&str, f64)> = Vec::new();
    for &e in &args.estimator {
        match e {
            EstimatorArg::Mean => rows.push((Estimator::Mean.name(), naive_mean(&s)?)),
            EstimatorArg::Vh => rows.push((Estimator::Vh.name(), vh_estimate(&s)?)),
            EstimatorArg::Ma => {
                let fit = ma_estimate(&s, &args.ma.template(), &args.ma.config(), &mut stream(cli.seed(), &[2]))?;
                if let Some(p) = &args.weights_out {
                    write_weights_to(&fit.weights, writer(Some(p))?)?;
                }
                if let Some(p) = &args.diagnostics_out {
                    write_diagnostics_to(&fit.diagnostics, writer(Some(p))?)?;
                }
                rows.push((Estimator::Ma.name(), fit.mu_hat));
            }
        }
    }
    write_estimates_to(&rows, writer(cli.out.as_deref())?)?;
    Ok(())
}

fn bootstrap(cli: &Cli, args: &BootstrapArgs) -> Result<()> {
    let s = load_sample(&args.ma.sample)?;
    let template = args.ma.template();
    let ma_cfg = args.ma.config();
    let fit = ma_estimate(&s, &template, &ma_cfg, &mut stream(cli.seed(), &[2]))?;
    let cfg = BootstrapConfig {
        replicates: args.replicates,
        mode: match args.mode {
            ModeArg::Full => BootstrapMode::Full,
            ModeArg::Fast => BootstrapMode::Fast,
        },
        ci_levels: args.levels.clone(),
        percentile: args.percentile,
        ..BootstrapConfig::default()
    };
    let result = parametric_bootstrap(&fit, &template, &cfg, &ma_cfg, &mut stream(cli.seed(), &[3]))?;
    if let Some(p) = &args.draws_out {
        write_draws_to(&result, writer(Some(p))?)?;
    }
    write_summary_to(&result, writer(cli.out.as_deref())?)?;
    Ok(())
}

fn study(cli: &Cli, args: &StudyArgs) -> Result<()> {
    let mut cfg = read_study_config(&args.config)?;
    if let Some(seed) = cli.seed {
        cfg.spec.master_seed = seed;
    }
    let result = run_study(&cfg.spec)?;
    write_study_csv(&result, writer(cli.out.as_deref())?)?;
    if let Some(p) = &args.skipped_out {
        write_skipped_csv(&result, writer(Some(p))?)?;
    } else if !result.skipped.is_empty() {
        eprintln!("{} cells skipped as infeasible", result.skipped.len());
    }
    match (&cfg.sensitivity, &args.sensitivity_out) {
        (Some(sizes), Some(p)) => write_study_csv(&run_sensitivity_n(&cfg.spec, sizes)?, writer(Some(p))?)?,
        (Some(_), None) => eprintln!("config lists sensitivity.pop_sizes; pass --sensitivity-out to run it"),
        _ => {}
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .context("setting up the thread pool")?;
    }
    match &cli.command {
        Command::GenNet(a) => gen_net(&cli, a),
        Command::Sample(a) => sample(&cli, a),
        Command::Estimate(a) => estimate(&cli, a),
        Command::Bootstrap(a) => bootstrap(&cli, a),
        Command::Study(a) => study(&cli, a),
    }
}
