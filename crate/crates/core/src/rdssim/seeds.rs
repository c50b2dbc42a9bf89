use rand::seq::IndexedRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::netcore::Network;

use super::design::{SamplingDesign, SeedMode};

/// Index drawn with probability proportional to `weights`, or `None` when all
/// weights are zero.
pub(crate) fn weighted_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Option<usize> {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return None;
    }
    let mut u = rng.random::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            if u < w {
                return Some(i);
            }
            u -= w;
        }
    }
    weights.iter().rposition(|&w| w > 0.0)
}

/// Sequential draws without replacement, probability proportional to degree,
/// from nodes accepted by `eligible`.
pub(crate) fn pps_degree<R, F>(net: &Network, count: usize, eligible: F, rng: &mut R) -> Result<Vec<usize>>
where
    R: Rng + ?Sized,
    F: Fn(usize) -> bool,
{
    let mut weights: Vec<f64> = (0..net.node_count())
        .map(|i| if eligible(i) { net.degree(i) as f64 } else { 0.0 })
        .collect();
    let available = weights.iter().filter(|&&w| w > 0.0).count();
    if available < count {
        return Err(Error::SeedPoolTooSmall {
            available,
            requested: count,
        });
    }
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let i = weighted_index(&weights, rng).expect("pool size checked");
        weights[i] = 0.0;
        out.push(i);
    }
    Ok(out)
}

/// Choose the initial respondents of an RDS sample.
///
/// Class matching picks a uniform unchosen node of each requested class. When
/// none is left it falls back to the unchosen nodes of the same infection
/// status whose degree is closest, choosing uniformly among ties.
pub fn select_seeds<R: Rng + ?Sized>(
    net: &Network,
    design: &SamplingDesign,
    rng: &mut R,
) -> Result<Vec<usize>> {
    design.validate()?;
    match &design.seed_mode {
        SeedMode::PpsDegreeAll => pps_degree(net, design.n_seeds, |_| true, rng),
        SeedMode::PpsDegreeInfectedOnly => {
            pps_degree(net, design.n_seeds, |i| net.is_infected(i), rng)
        }
        SeedMode::MatchClasses(classes) => {
            let mut chosen = vec![false; net.node_count()];
            let mut out = Vec::with_capacity(classes.len());
            for class in classes {
                let mut best = Vec::new();
                let mut best_gap = u32::MAX;
                for i in 0..net.node_count() {
                    if chosen[i] || net.is_infected(i) != class.infected {
                        continue;
                    }
                    let gap = (net.degree(i) as u32).abs_diff(class.degree);
                    if gap < best_gap {
                        best_gap = gap;
                        best.clear();
                    }
                    if gap == best_gap {
                        best.push(i);
                    }
                }
                let &pick = best.choose(rng).ok_or(Error::SeedPoolTooSmall {
                    available: out.len(),
                    requested: classes.len(),
                })?;
                chosen[pick] = true;
                out.push(pick);
            }
            Ok(out)
        }
    }
}
