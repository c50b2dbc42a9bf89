use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::netcore::{ClassKey, Network};
use crate::rng;

use super::design::SamplingDesign;
use super::recruit::run_rds;
use super::seeds::select_seeds;

/// How often each (degree, infection) class was sampled across `m` simulated
/// RDS samples.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClassCounts {
    pub u: BTreeMap<ClassKey, u64>,
    pub m: u64,
    /// Samples that ended before reaching the target size.
    pub short_samples: u64,
}

impl ClassCounts {
    pub fn get(&self, key: ClassKey) -> u64 {
        self.u.get(&key).copied().unwrap_or(0)
    }

    pub fn short_rate(&self) -> f64 {
        if self.m == 0 {
            0.0
        } else {
            self.short_samples as f64 / self.m as f64
        }
    }
}

/// Draw `m2` RDS samples (seeds included) from each network and tally the
/// classes of the sampled nodes. Every sample runs on its own stream derived
/// from one value taken from `rng`, so results do not depend on scheduling.
pub fn simulate_class_counts<R: Rng + ?Sized>(
    nets: &[Network],
    design: &SamplingDesign,
    m2: usize,
    rng: &mut R,
) -> Result<ClassCounts> {
    if nets.is_empty() {
        return Err(Error::Empty("network list"));
    }
    design.validate()?;
    let base: u64 = rng.random();
    let runs: Vec<Result<(BTreeMap<ClassKey, u64>, bool)>> = (0..nets.len() * m2)
        .into_par_iter()
        .map(|task| {
            let (net_idx, rep) = (task / m2.max(1), task % m2.max(1));
            let net = &nets[net_idx];
            let mut r = rng::stream(base, &[net_idx as u64, rep as u64]);
            let seeds = select_seeds(net, design, &mut r)?;
            let sample = run_rds(net, design, &seeds, &mut r)?;
            let short = sample.len() < design.n.min(net.node_count());
            Ok((sample.class_counts(), short))
        })
        .collect();
    let mut out = ClassCounts::default();
    for run in runs {
        let (counts, short) = run?;
        for (k, c) in counts {
            *out.u.entry(k).or_default() += c;
        }
        out.m += 1;
        out.short_samples += u64::from(short);
    }
    Ok(out)
}
