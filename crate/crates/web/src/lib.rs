//! Browser bindings: generate a population, draw an RDS sample from it, and
//! estimate prevalence from the sample. Results come back as JSON strings.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use rdsma::estimate::{ma_estimate, naive_mean, vh_estimate, MaConfig, OffspringSource};
use rdsma::netcore::{mixing_and_ratios, Network};
use rdsma::netgen::{gen_bernoulli_mixing, MixingSpec};
use rdsma::rdssim::{run_rds, select_seeds, Coupons, RdsSample, SamplingDesign, SeedMode};
use rdsma::rng::stream;

/// Node count above which `generate` refuses; the page draws every node.
pub const MAX_NODES: usize = 2000;

#[derive(Serialize)]
struct NetworkView {
    infected: Vec<bool>,
    edges: Vec<(usize, usize)>,
    prevalence: f64,
    mean_degree: f64,
    homophily_r: Option<f64>,
    activity_w: f64,
    cross_ties: usize,
}

#[derive(Serialize)]
struct Respondent {
    id: usize,
    recruiter: Option<usize>,
    wave: u32,
    degree: u32,
    infected: bool,
}

#[derive(Serialize)]
struct SampleView {
    respondents: Vec<Respondent>,
    waves: u32,
    died_out: bool,
    reseeds: usize,
    sample_mean: f64,
}

#[derive(Serialize)]
struct WeightView {
    degree: u32,
    infected: bool,
    pi: f64,
}

#[derive(Serialize)]
struct EstimateView {
    truth: f64,
    mean: f64,
    vh: f64,
    ma: f64,
    eta_path: Vec<f64>,
    weights: Vec<WeightView>,
}

/// Demo session. Every call draws from its own stream derived from the
/// session seed and a call counter, so a page reload with the same seed
/// replays the same results.
#[wasm_bindgen]
pub struct Demo {
    seed: u64,
    calls: u64,
    network: Option<Network>,
    sample: Option<RdsSample>,
    coupons: u32,
}

impl Demo {
    fn next_stream(&mut self, op: u64) -> rdsma::rng::SimRng {
        self.calls += 1;
        stream(self.seed, &[op, self.calls])
    }

    pub fn generate_json(
        &mut self,
        node_count: usize,
        prevalence: f64,
        mean_degree: f64,
        homophily_r: f64,
        activity_w: f64,
    ) -> Result<String, String> {
        if node_count > MAX_NODES {
            return Err(format!("at most {MAX_NODES} nodes"));
        }
        let spec = MixingSpec {
            node_count,
            prevalence,
            mean_degree,
            homophily_r,
            activity_w,
        };
        let mut r = self.next_stream(0);
        let net = gen_bernoulli_mixing(&spec, &mut r).map_err(|e| e.to_string())?;
        let st = mixing_and_ratios(&net).map_err(|e| e.to_string())?;
        let view = NetworkView {
            infected: net.infection().to_vec(),
            edges: net.edges().collect(),
            prevalence: net.prevalence(),
            mean_degree: st.mean_degree,
            homophily_r: st.homophily_is_finite().then_some(st.homophily_r),
            activity_w: st.activity_w,
            cross_ties: st.cross_ties,
        };
        self.network = Some(net);
        self.sample = None;
        serde_json::to_string(&view).map_err(|e| e.to_string())
    }

    pub fn sample_json(
        &mut self,
        n: usize,
        n_seeds: usize,
        infected_seeds: bool,
        coupons: u32,
        referral_weight: f64,
    ) -> Result<String, String> {
        let mut r = self.next_stream(1);
        let net = self.network.as_ref().ok_or("generate a network first")?;
        let design = SamplingDesign {
            n: n.min(net.node_count()),
            n_seeds,
            seed_mode: if infected_seeds {
                SeedMode::PpsDegreeInfectedOnly
            } else {
                SeedMode::PpsDegreeAll
            },
            coupons: Coupons::Fixed(coupons),
            referral_weight_infected: referral_weight,
            reseed_on_dieout: true,
        };
        let seeds = select_seeds(net, &design, &mut r).map_err(|e| e.to_string())?;
        let s = run_rds(net, &design, &seeds, &mut r).map_err(|e| e.to_string())?;
        let view = SampleView {
            respondents: s
                .records
                .iter()
                .map(|rec| Respondent {
                    id: rec.id,
                    recruiter: rec.recruiter,
                    wave: rec.wave,
                    degree: rec.degree,
                    infected: rec.infected,
                })
                .collect(),
            waves: s.records.iter().map(|r| r.wave).max().unwrap_or(0),
            died_out: s.died_out,
            reseeds: s.reseeds,
            sample_mean: naive_mean(&s).map_err(|e| e.to_string())?,
        };
        self.coupons = coupons;
        self.sample = Some(s);
        serde_json::to_string(&view).map_err(|e| e.to_string())
    }

    pub fn estimate_json(&mut self, pop_size: usize, iterations: usize, m1: usize, m2: usize) -> Result<String, String> {
        let mut r = self.next_stream(2);
        let net = self.network.as_ref().ok_or("generate a network first")?;
        let s = self.sample.as_ref().ok_or("draw a sample first")?;
        let mut cfg = MaConfig {
            iterations,
            m1,
            m2,
            pop_size,
            offspring: OffspringSource::Design,
            ..MaConfig::default()
        };
        cfg.fit.tetrad_n = 20_000;
        let template = SamplingDesign {
            coupons: Coupons::Fixed(self.coupons),
            ..SamplingDesign::default()
        };
        let fit = ma_estimate(s, &template, &cfg, &mut r).map_err(|e| e.to_string())?;
        let view = EstimateView {
            truth: net.prevalence(),
            mean: naive_mean(s).map_err(|e| e.to_string())?,
            vh: vh_estimate(s).map_err(|e| e.to_string())?,
            ma: fit.mu_hat,
            eta_path: fit.eta_path.clone(),
            weights: fit
                .weights
                .iter()
                .map(|(k, pi)| WeightView {
                    degree: k.degree,
                    infected: k.infected,
                    pi,
                })
                .collect(),
        };
        serde_json::to_string(&view).map_err(|e| e.to_string())
    }
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new(seed: u64) -> Demo {
        Demo {
            seed,
            calls: 0,
            network: None,
            sample: None,
            coupons: 2,
        }
    }

    /// Population with two-group mixing. Returns node labels, edges and
    /// realized mixing statistics.
    pub fn generate(
        &mut self,
        node_count: usize,
        prevalence: f64,
        mean_degree: f64,
        homophily_r: f64,
        activity_w: f64,
    ) -> Result<String, JsError> {
        self.generate_json(node_count, prevalence, mean_degree, homophily_r, activity_w)
            .map_err(|e| JsError::new(&e))
    }

    /// RDS sample from the current population.
    pub fn sample(
        &mut self,
        n: usize,
        n_seeds: usize,
        infected_seeds: bool,
        coupons: u32,
        referral_weight: f64,
    ) -> Result<String, JsError> {
        self.sample_json(n, n_seeds, infected_seeds, coupons, referral_weight)
            .map_err(|e| JsError::new(&e))
    }

    /// Sample mean, Volz-Heckathorn and model-assisted estimates for the
    /// current sample.
    pub fn estimate(&mut self, pop_size: usize, iterations: usize, m1: usize, m2: usize) -> Result<String, JsError> {
        self.estimate_json(pop_size, iterations, m1, m2).map_err(|e| JsError::new(&e))
    }
}
