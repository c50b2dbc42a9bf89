//! Exact inclusion probabilities for tiny RDS designs by enumerating every
//! recruitment trajectory.
#![allow(dead_code)]

use rdsma::netcore::Network;

pub struct TinyDesign {
    pub n: usize,
    pub coupons: usize,
    pub referral_weight: f64,
}

struct Walk<'a> {
    net: &'a Network,
    design: &'a TinyDesign,
    inclusion: Vec<f64>,
}

impl Walk<'_> {
    fn finish(&mut self, sampled: &[bool], p: f64) {
        for (i, &s) in sampled.iter().enumerate() {
            if s {
                self.inclusion[i] += p;
            }
        }
    }

    /// `quota`: picks the front respondent still has to make; `None` means the
    /// front respondent has not started recruiting.
    fn step(&mut self, sampled: &mut Vec<bool>, queue: &[usize], quota: Option<usize>, count: usize, p: f64) {
        if count == self.design.n {
            return self.finish(sampled, p);
        }
        let Some((&front, rest)) = queue.split_first() else {
            return self.finish(sampled, p);
        };
        let avail: Vec<usize> = self
            .net
            .neighbors(front)
            .iter()
            .map(|&j| j as usize)
            .filter(|&j| !sampled[j])
            .collect();
        let left = quota.unwrap_or(self.design.coupons.min(avail.len()));
        if left == 0 {
            return self.step(sampled, rest, None, count, p);
        }
        let w = |j: usize| if self.net.is_infected(j) { self.design.referral_weight } else { 1.0 };
        let total: f64 = avail.iter().map(|&j| w(j)).sum();
        for &j in &avail {
            sampled[j] = true;
            let mut next = queue.to_vec();
            next.push(j);
            self.step(sampled, &next, Some(left - 1), count + 1, p * w(j) / total);
            sampled[j] = false;
        }
    }
}

/// Node inclusion probabilities of a sample started from `seeds`, with no
/// replacement seeds on die-out.
pub fn exact_inclusion(net: &Network, design: &TinyDesign, seeds: &[usize]) -> Vec<f64> {
    let mut walk = Walk {
        net,
        design,
        inclusion: vec![0.0; net.node_count()],
    };
    let mut sampled = vec![false; net.node_count()];
    let take = seeds.len().min(design.n);
    for &s in &seeds[..take] {
        sampled[s] = true;
    }
    walk.step(&mut sampled, &seeds[..take], None, take, 1.0);
    walk.inclusion
}

/// As [`exact_inclusion`] with a single seed drawn proportional to degree.
pub fn exact_inclusion_pps_seed(net: &Network, design: &TinyDesign) -> Vec<f64> {
    let total: f64 = (0..net.node_count()).map(|i| net.degree(i) as f64).sum();
    let mut out = vec![0.0; net.node_count()];
    for s in 0..net.node_count() {
        let ps = net.degree(s) as f64 / total;
        if ps == 0.0 {
            continue;
        }
        for (o, q) in out.iter_mut().zip(exact_inclusion(net, design, &[s])) {
            *o += ps * q;
        }
    }
    out
}

/// A fixed 8-node test network: a 6-cycle with two pendant-ish extras and a chord.
pub fn eight_node_network() -> Network {
    Network::from_edges(
        vec![true, false, true, false, false, true, false, false],
        [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3), (2, 6), (6, 7), (4, 7)],
    )
    .expect("valid network")
}
