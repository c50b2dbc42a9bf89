//! Study configuration files.
//!
//! One `key = value` per line, `#` starts a comment, list values are comma
//! separated. List-valued network and design keys span a grid.
//!
//! ```text
//! study.replications = 200
//! study.seed = 7
//! network.homophily_R = 1, 3, 5
//! design.seed_mode = pps_degree_infected_only
//! bootstrap.B = 200
//! ```

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::bootstrap::{BootstrapConfig, BootstrapMode};
use crate::error::{Error, Result};
use crate::estimate::OffspringSource;
use crate::netgen::MixingSpec;
use crate::rdssim::{Coupons, SamplingDesign, SeedMode};

use super::study::{Estimator, StudySpec};

#[derive(Clone, Debug, PartialEq)]
pub struct StudyConfig {
    pub spec: StudySpec,
    /// Assumed population sizes for a sensitivity run, if requested.
    pub sensitivity: Option<Vec<usize>>,
}

const KEYS: &[&str] = &[
    "study.replications",
    "study.seed",
    "study.estimators",
    "network.N",
    "network.prevalence",
    "network.mean_degree",
    "network.homophily_R",
    "network.activity_w",
    "design.n",
    "design.seeds",
    "design.seed_mode",
    "design.coupons",
    "design.referral_weight",
    "design.reseed",
    "ma.iterations",
    "ma.m1",
    "ma.m2",
    "ma.tetrad_n",
    "ma.pop_size",
    "ma.offspring",
    "ma.hajek_class_table",
    "ma.burn_in_per_edge",
    "ma.spacing_per_edge",
    "ma.anneal_proposals_per_edge",
    "ma.anneal_cooling",
    "bootstrap.B",
    "bootstrap.mode",
    "bootstrap.levels",
    "bootstrap.chain_block",
    "bootstrap.percentile",
    "sensitivity.pop_sizes",
];

struct Entry {
    line: usize,
    values: Vec<String>,
}

struct Parsed {
    path: String,
    entries: BTreeMap<String, Entry>,
}

impl Parsed {
    fn err(&self, key: &str, message: String) -> Error {
        Error::Config {
            path: self.path.clone().into(),
            line: self.entries.get(key).map_or(0, |e| e.line),
            message,
        }
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        let Some(e) = self.entries.get(key) else {
            return Ok(None);
        };
        e.values
            .iter()
            .map(|v| {
                v.parse()
                    .map_err(|_| self.err(key, format!("cannot parse {v:?} for {key}")))
            })
            .collect::<Result<Vec<T>>>()
            .map(Some)
    }

    fn one<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.list::<T>(key)? {
            None => Ok(None),
            Some(mut v) if v.len() == 1 => Ok(v.pop()),
            Some(_) => Err(self.err(key, format!("{key} takes a single value"))),
        }
    }

    fn flag(&self, key: &str) -> Result<Option<bool>> {
        match self.one::<String>(key)?.as_deref() {
            None => Ok(None),
            Some("true" | "1" | "yes") => Ok(Some(true)),
            Some("false" | "0" | "no") => Ok(Some(false)),
            Some(v) => Err(self.err(key, format!("expected true or false, got {v:?}"))),
        }
    }
}

fn tokenize(path: &str, text: &str) -> Result<Parsed> {
    let mut entries = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| Error::Config {
            path: path.into(),
            line,
            message,
        };
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(format!("expected key = value, got {content:?}")))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(err(format!("unknown key {key:?}")));
        }
        let values: Vec<String> = value.split(',').map(|v| v.trim().to_string()).collect();
        if values.iter().any(String::is_empty) {
            return Err(err(format!("empty value for {key}")));
        }
        if entries.insert(key.to_string(), Entry { line, values }).is_some() {
            return Err(err(format!("{key} given twice")));
        }
    }
    Ok(Parsed {
        path: path.into(),
        entries,
    })
}

fn parse_seed_mode(p: &Parsed, v: &str) -> Result<SeedMode> {
    match v {
        "pps_degree_all" | "pps" => Ok(SeedMode::PpsDegreeAll),
        "pps_degree_infected_only" | "infected" => Ok(SeedMode::PpsDegreeInfectedOnly),
        _ => Err(p.err("design.seed_mode", format!("unknown seed mode {v:?}"))),
    }
}

/// Parse configuration text. `path` is only used in error messages.
pub fn parse_study_config(path: &str, text: &str) -> Result<StudyConfig> {
    let p = tokenize(path, text)?;
    let mut spec = StudySpec::default();

    if let Some(v) = p.one("study.replications")? {
        spec.replications = v;
    }
    if let Some(v) = p.one("study.seed")? {
        spec.master_seed = v;
    }
    if let Some(v) = p.list::<String>("study.estimators")? {
        spec.estimators = v.iter().map(|s| s.parse()).collect::<Result<Vec<Estimator>>>()
            .map_err(|e| p.err("study.estimators", e.to_string()))?;
    }

    let base = MixingSpec::default();
    let sizes = p.list("network.N")?.unwrap_or(vec![base.node_count]);
    let prevalences = p.list("network.prevalence")?.unwrap_or(vec![base.prevalence]);
    let degrees = p.list("network.mean_degree")?.unwrap_or(vec![base.mean_degree]);
    let homophily = p.list("network.homophily_R")?.unwrap_or(vec![base.homophily_r]);
    let activity = p.list("network.activity_w")?.unwrap_or(vec![base.activity_w]);
    spec.networks.clear();
    for &node_count in &sizes {
        for &prevalence in &prevalences {
            for &mean_degree in &degrees {
                for &homophily_r in &homophily {
                    for &activity_w in &activity {
                        let m = MixingSpec {
                            node_count,
                            prevalence,
                            mean_degree,
                            homophily_r,
                            activity_w,
                        };
                        m.validate().map_err(|e| p.err("network.N", e.to_string()))?;
                        spec.networks.push(m);
                    }
                }
            }
        }
    }

    let base = SamplingDesign::default();
    let ns = p.list("design.n")?.unwrap_or(vec![base.n]);
    let seeds = p.list("design.seeds")?.unwrap_or(vec![base.n_seeds]);
    let modes = match p.list::<String>("design.seed_mode")? {
        Some(v) => v.iter().map(|m| parse_seed_mode(&p, m)).collect::<Result<Vec<_>>>()?,
        None => vec![base.seed_mode.clone()],
    };
    let weights = p.list("design.referral_weight")?.unwrap_or(vec![base.referral_weight_infected]);
    let coupons = Coupons::Fixed(p.one("design.coupons")?.unwrap_or(2));
    let reseed = p.flag("design.reseed")?.unwrap_or(base.reseed_on_dieout);
    spec.designs.clear();
    for &n in &ns {
        for &n_seeds in &seeds {
            for mode in &modes {
                for &w in &weights {
                    let d = SamplingDesign {
                        n,
                        n_seeds,
                        seed_mode: mode.clone(),
                        coupons: coupons.clone(),
                        referral_weight_infected: w,
                        reseed_on_dieout: reseed,
                    };
                    d.validate().map_err(|e| p.err("design.n", e.to_string()))?;
                    spec.designs.push(d);
                }
            }
        }
    }

    let ma = &mut spec.ma;
    if let Some(v) = p.one("ma.iterations")? {
        ma.iterations = v;
    }
    if let Some(v) = p.one("ma.m1")? {
        ma.m1 = v;
    }
    if let Some(v) = p.one("ma.m2")? {
        ma.m2 = v;
    }
    if let Some(v) = p.one("ma.tetrad_n")? {
        ma.fit.tetrad_n = v;
    }
    if let Some(v) = p.one("ma.burn_in_per_edge")? {
        ma.mcmc.burn_in_per_edge = v;
    }
    if let Some(v) = p.one("ma.spacing_per_edge")? {
        ma.mcmc.spacing_per_edge = v;
    }
    if let Some(v) = p.one("ma.anneal_proposals_per_edge")? {
        ma.fit.anneal.proposals_per_edge = v;
    }
    if let Some(v) = p.one("ma.anneal_cooling")? {
        ma.fit.anneal.cooling = v;
    }
    if let Some(v) = p.flag("ma.hajek_class_table")? {
        ma.hajek_class_table = v;
    }
    if let Some(v) = p.one::<String>("ma.offspring")? {
        ma.offspring = match v.as_str() {
            "design" => OffspringSource::Design,
            "pooled" => OffspringSource::Pooled,
            "by_wave" => OffspringSource::ByWave,
            _ => return Err(p.err("ma.offspring", format!("unknown offspring source {v:?}"))),
        };
    }
    spec.assumed_pop_size = p.one("ma.pop_size")?;

    let replicates: Option<usize> = p.one("bootstrap.B")?;
    if replicates.is_some_and(|b| b > 0) {
        let mut b = BootstrapConfig {
            replicates: replicates.unwrap_or(0),
            ..BootstrapConfig::default()
        };
        if let Some(m) = p.one::<String>("bootstrap.mode")? {
            b.mode = match m.as_str() {
                "fast" => BootstrapMode::Fast,
                "full" => BootstrapMode::Full,
                _ => return Err(p.err("bootstrap.mode", format!("unknown mode {m:?}"))),
            };
        }
        if let Some(l) = p.list("bootstrap.levels")? {
            b.ci_levels = l;
        }
        if let Some(c) = p.one("bootstrap.chain_block")? {
            b.chain_block = c;
        }
        if let Some(f) = p.flag("bootstrap.percentile")? {
            b.percentile = f;
        }
        b.validate().map_err(|e| p.err("bootstrap.B", e.to_string()))?;
        spec.bootstrap = Some(b);
    }

    let sensitivity = p.list("sensitivity.pop_sizes")?;
    spec.validate().map_err(|e| Error::Config {
        path: path.into(),
        line: 0,
        message: e.to_string(),
    })?;
    Ok(StudyConfig { spec, sensitivity })
}

pub fn read_study_config(path: &Path) -> Result<StudyConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_study_config(&path.display().to_string(), &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_grids_and_overrides() {
        let text = "# seed-bias sweep\n\
                    study.replications = 20\n\
                    study.seed = 99\n\
                    study.estimators = mean, ma\n\
                    network.homophily_R = 1, 3, 5   # three levels\n\
                    design.seed_mode = pps_degree_infected_only\n\
                    design.seeds = 6, 20\n\
                    ma.m1 = 5\n\
                    ma.offspring = by_wave\n\
                    bootstrap.B = 50\n\
                    bootstrap.levels = 0.95\n";
        let c = parse_study_config("t.conf", text).unwrap();
        let s = &c.spec;
        assert_eq!(s.replications, 20);
        assert_eq!(s.master_seed, 99);
        assert_eq!(s.estimators, vec![Estimator::Mean, Estimator::Ma]);
        assert_eq!(s.networks.len(), 3);
        assert_eq!(s.networks[2].homophily_r, 5.0);
        assert_eq!(s.designs.len(), 2);
        assert_eq!(s.designs[1].n_seeds, 20);
        assert_eq!(s.designs[0].seed_mode, SeedMode::PpsDegreeInfectedOnly);
        assert_eq!(s.cells().len(), 6);
        assert_eq!(s.ma.m1, 5);
        assert_eq!(s.ma.m2, 10);
        assert_eq!(s.ma.offspring, OffspringSource::ByWave);
        let b = s.bootstrap.as_ref().unwrap();
        assert_eq!((b.replicates, b.ci_levels.clone()), (50, vec![0.95]));
        assert!(c.sensitivity.is_none());
    }

    #[test]
    fn defaults_are_desk_scale() {
        let c = parse_study_config("empty", "").unwrap();
        assert_eq!(c.spec, StudySpec::default());
        assert_eq!(c.spec.replications, 200);
        assert_eq!((c.spec.ma.m1, c.spec.ma.m2, c.spec.ma.fit.tetrad_n), (10, 10, 20_000));
        assert!(c.spec.bootstrap.is_none());
    }

    #[test]
    fn reports_bad_lines() {
        let e = parse_study_config("x.conf", "study.seed = 1\nnetwork.R = 5\n").unwrap_err();
        match e {
            Error::Config { line, message, .. } => {
                assert_eq!(line, 2);
                assert!(message.contains("network.R"));
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_study_config("x", "study.seed 1\n").is_err());
        assert!(parse_study_config("x", "study.seed = 1\nstudy.seed = 2\n").is_err());
        assert!(parse_study_config("x", "study.seed = one\n").is_err());
        assert!(parse_study_config("x", "study.seed = 1, 2\n").is_err());
        assert!(parse_study_config("x", "design.seed_mode = random\n").is_err());
        assert!(parse_study_config("x", "design.seeds = 600\n").is_err());
        assert!(parse_study_config("x", "bootstrap.B = 1\n").is_err());
        assert!(parse_study_config("x", "study.estimators = mean,\n").is_err());
    }
}
