use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::netcore::ClassKey;

/// Largest number of recruits a respondent can be assigned.
pub const MAX_OFFSPRING: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub enum SeedMode {
    /// Sequential draws without replacement, probability proportional to degree.
    PpsDegreeAll,
    /// As [`SeedMode::PpsDegreeAll`], restricted to infected nodes.
    PpsDegreeInfectedOnly,
    /// One uniformly chosen node per listed class.
    MatchClasses(Vec<ClassKey>),
}

/// Offspring distributions over `0..=MAX_OFFSPRING` recruits, keyed by
/// (wave, infected).
///
/// Lookups for a missing cell fall back to the closest earlier wave with the
/// same infection status, then the closest later wave, then the other status.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OffspringTable {
    cells: BTreeMap<(u32, bool), [f64; MAX_OFFSPRING + 1]>,
}

impl OffspringTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, wave: u32, infected: bool, probs: [f64; MAX_OFFSPRING + 1]) -> Result<()> {
        let total: f64 = probs.iter().sum();
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "offspring distribution {probs:?} for wave {wave}, infected {infected}"
            )));
        }
        self.cells.insert((wave, infected), probs);
        Ok(())
    }

    /// Normalize integer tallies into distributions. Cells with no
    /// respondents are left out.
    pub fn from_tallies<I>(tallies: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((u32, bool), [u64; MAX_OFFSPRING + 1])>,
    {
        let mut table = Self::new();
        for ((wave, infected), counts) in tallies {
            let total: u64 = counts.iter().sum();
            if total == 0 {
                continue;
            }
            let probs = counts.map(|c| c as f64 / total as f64);
            table.set(wave, infected, probs)?;
        }
        Ok(table)
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> impl Iterator<Item = ((u32, bool), &[f64; MAX_OFFSPRING + 1])> {
        self.cells.iter().map(|(k, v)| (*k, v))
    }

    pub fn distribution(&self, wave: u32, infected: bool) -> Option<&[f64; MAX_OFFSPRING + 1]> {
        self.lookup(wave, infected)
            .or_else(|| self.lookup(wave, !infected))
    }

    fn lookup(&self, wave: u32, infected: bool) -> Option<&[f64; MAX_OFFSPRING + 1]> {
        if let Some(p) = self.cells.get(&(wave, infected)) {
            return Some(p);
        }
        let earlier = self
            .cells
            .range(..(wave, infected))
            .rev()
            .find(|((_, z), _)| *z == infected);
        let later = || {
            self.cells
                .range((wave, infected)..)
                .find(|((_, z), _)| *z == infected)
        };
        earlier.or_else(later).map(|(_, p)| p)
    }

    pub fn draw<R: Rng + ?Sized>(&self, wave: u32, infected: bool, rng: &mut R) -> usize {
        let Some(p) = self.distribution(wave, infected) else {
            return 0;
        };
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (k, q) in p.iter().enumerate() {
            acc += q;
            if u < acc {
                return k;
            }
        }
        p.iter().rposition(|&q| q > 0.0).unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Coupons {
    /// Each respondent recruits up to this many unsampled alters.
    Fixed(u32),
    Offspring(OffspringTable),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplingDesign {
    pub n: usize,
    pub n_seeds: usize,
    pub seed_mode: SeedMode,
    pub coupons: Coupons,
    /// Relative chance that an infected alter receives a coupon.
    pub referral_weight_infected: f64,
    pub reseed_on_dieout: bool,
}

impl Default for SamplingDesign {
    fn default() -> Self {
        Self {
            n: 500,
            n_seeds: 10,
            seed_mode: SeedMode::PpsDegreeAll,
            coupons: Coupons::Fixed(2),
            referral_weight_infected: 1.0,
            reseed_on_dieout: true,
        }
    }
}

impl SamplingDesign {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.n == 0 || self.n_seeds == 0 {
            return bad("sample size and seed count must be positive".into());
        }
        if self.n_seeds > self.n {
            return bad(format!("{} seeds exceed sample size {}", self.n_seeds, self.n));
        }
        if !(self.referral_weight_infected.is_finite() && self.referral_weight_infected > 0.0) {
            return bad(format!("referral weight {}", self.referral_weight_infected));
        }
        if let SeedMode::MatchClasses(classes) = &self.seed_mode {
            if classes.len() != self.n_seeds {
                return bad(format!(
                    "{} seed classes for {} seeds",
                    classes.len(),
                    self.n_seeds
                ));
            }
        }
        if let Coupons::Offspring(t) = &self.coupons {
            if t.is_empty() {
                return bad("empty offspring table".into());
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn offspring_lookup_falls_back() {
        let mut t = OffspringTable::new();
        t.set(0, true, [0.0, 0.0, 1.0, 0.0]).unwrap();
        t.set(2, true, [0.0, 1.0, 0.0, 0.0]).unwrap();
        t.set(1, false, [1.0, 0.0, 0.0, 0.0]).unwrap();
        let mut r = seeded(1);
        assert_eq!(t.draw(0, true, &mut r), 2);
        assert_eq!(t.draw(1, true, &mut r), 2);
        assert_eq!(t.draw(7, true, &mut r), 1);
        assert_eq!(t.draw(0, false, &mut r), 0);
        assert_eq!(t.draw(9, false, &mut r), 0);
        assert!(t.set(0, false, [0.5, 0.6, 0.0, 0.0]).is_err());

        let mut only = OffspringTable::new();
        only.set(3, false, [0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(only.draw(0, true, &mut r), 3);
    }

    #[test]
    fn draws_follow_distribution() {
        let mut t = OffspringTable::new();
        t.set(0, true, [0.1, 0.2, 0.3, 0.4]).unwrap();
        let mut r = seeded(2);
        let mut counts = [0usize; 4];
        let n = 100_000;
        for _ in 0..n {
            counts[t.draw(0, true, &mut r)] += 1;
        }
        for (k, c) in counts.iter().enumerate() {
            let p = 0.1 * (k + 1) as f64;
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((*c as f64 / n as f64 - p).abs() < 4.0 * se);
        }
    }

    #[test]
    fn validation() {
        assert!(SamplingDesign::default().validate().is_ok());
        let d = SamplingDesign {
            n_seeds: 600,
            ..SamplingDesign::default()
        };
        assert!(d.validate().is_err());
        let d = SamplingDesign {
            referral_weight_infected: 0.0,
            ..SamplingDesign::default()
        };
        assert!(d.validate().is_err());
        let d = SamplingDesign {
            n_seeds: 2,
            seed_mode: SeedMode::MatchClasses(vec![ClassKey::new(3, true)]),
            ..SamplingDesign::default()
        };
        assert!(d.validate().is_err());
    }
}
