use std::collections::VecDeque;

use rand::Rng;

use crate::error::{Error, Result};
use crate::netcore::{node_cross_alters, Network};

use super::design::{Coupons, SamplingDesign, MAX_OFFSPRING};
use super::sample::{RdsRecord, RdsSample};
use super::seeds::{pps_degree, weighted_index};

struct Recruitment<'a> {
    net: &'a Network,
    design: &'a SamplingDesign,
    target: usize,
    sampled: Vec<bool>,
    sample: RdsSample,
    queue: VecDeque<usize>,
    /// Recruits each respondent is to attempt (offspring tables only).
    quota: Vec<usize>,
}

impl Recruitment<'_> {
    fn full(&self) -> bool {
        self.sample.records.len() >= self.target
    }

    fn enroll<R: Rng + ?Sized>(&mut self, node: usize, recruiter: Option<usize>, rng: &mut R) -> Result<()> {
        let wave = match recruiter {
            Some(p) => self.sample.records[p].wave + 1,
            None => 0,
        };
        let infected = self.net.is_infected(node);
        self.sampled[node] = true;
        self.queue.push_back(self.sample.records.len());
        if let Coupons::Offspring(t) = &self.design.coupons {
            self.quota.push(t.draw(wave, infected, rng));
        }
        if recruiter.is_none() {
            self.sample.seed_ids.push(node);
        }
        self.sample.records.push(RdsRecord {
            id: node,
            degree: self.net.degree(node) as u32,
            infected,
            cross_alters: Some(node_cross_alters(self.net, node)? as u32),
            wave,
            recruiter: recruiter.map(|p| self.sample.records[p].id),
        });
        Ok(())
    }

    fn recruit_from<R: Rng + ?Sized>(&mut self, idx: usize, rng: &mut R) -> Result<()> {
        let node = self.sample.records[idx].id;
        let mut alters: Vec<usize> = self
            .net
            .neighbors(node)
            .iter()
            .map(|&j| j as usize)
            .filter(|&j| !self.sampled[j])
            .collect();
        let quota = match &self.design.coupons {
            Coupons::Fixed(c) => *c as usize,
            Coupons::Offspring(_) => self.quota[idx],
        };
        let take = quota.min(alters.len());
        let w = self.design.referral_weight_infected;
        let mut weights: Vec<f64> = alters
            .iter()
            .map(|&j| if self.net.is_infected(j) { w } else { 1.0 })
            .collect();
        for _ in 0..take {
            let k = weighted_index(&weights, rng).expect("positive weights");
            let j = alters.swap_remove(k);
            weights.swap_remove(k);
            self.enroll(j, Some(idx), rng)?;
            if self.full() {
                return Ok(());
            }
        }
        if matches!(self.design.coupons, Coupons::Offspring(_)) {
            self.redistribute(idx, quota - take);
        }
        Ok(())
    }

    /// Hand unfulfilled recruitments to the next queued respondents of the
    /// same infection status that have room for another recruit.
    fn redistribute(&mut self, from: usize, mut shortfall: usize) {
        let status = self.sample.records[from].infected;
        for &q in &self.queue {
            if shortfall == 0 {
                break;
            }
            if self.sample.records[q].infected == status {
                let room = MAX_OFFSPRING.saturating_sub(self.quota[q]);
                let moved = room.min(shortfall);
                self.quota[q] += moved;
                shortfall -= moved;
            }
        }
    }
}

/// Simulate an RDS sample starting from `seeds`.
///
/// Respondents recruit in first-in first-out order. Each recruits from alters
/// not yet sampled, drawing without replacement with weight
/// `referral_weight_infected` on infected alters, until the design's coupon
/// count or the available alters run out. Sampling stops as soon as `n`
/// respondents are enrolled. If the queue empties first, a replacement seed is
/// drawn proportional to degree from the unsampled nodes when the design asks
/// for it; otherwise the sample is returned short with `died_out` set.
pub fn run_rds<R: Rng + ?Sized>(
    net: &Network,
    design: &SamplingDesign,
    seeds: &[usize],
    rng: &mut R,
) -> Result<RdsSample> {
    design.validate()?;
    if seeds.is_empty() {
        return Err(Error::Empty("seed list"));
    }
    let mut seen = vec![false; net.node_count()];
    for &s in seeds {
        net.check_node(s)?;
        if std::mem::replace(&mut seen[s], true) {
            return Err(Error::InvalidParameter(format!("seed {s} listed twice")));
        }
    }
    let mut state = Recruitment {
        net,
        design,
        target: design.n.min(net.node_count()),
        sampled: vec![false; net.node_count()],
        sample: RdsSample::default(),
        queue: VecDeque::new(),
        quota: Vec::new(),
    };
    for &s in seeds {
        if state.full() {
            break;
        }
        state.enroll(s, None, rng)?;
    }
    while !state.full() {
        match state.queue.pop_front() {
            Some(idx) => state.recruit_from(idx, rng)?,
            None => {
                if !design.reseed_on_dieout {
                    state.sample.died_out = true;
                    break;
                }
                let sampled = &state.sampled;
                match pps_degree(net, 1, |i| !sampled[i], rng) {
                    Ok(s) => {
                        state.enroll(s[0], None, rng)?;
                        state.sample.reseeds += 1;
                    }
                    Err(_) => {
                        state.sample.died_out = true;
                        break;
                    }
                }
            }
        }
    }
    Ok(state.sample)
}
