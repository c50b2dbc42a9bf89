use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::netcore::{node_cross_alters, ClassKey, Network};

use super::design::{OffspringTable, MAX_OFFSPRING};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RdsRecord {
    /// Respondent id. For simulated samples this is the network node index.
    pub id: usize,
    pub degree: u32,
    pub infected: bool,
    /// Number of infected alters, when known.
    pub cross_alters: Option<u32>,
    pub wave: u32,
    /// Id of the recruiter; `None` for seeds.
    pub recruiter: Option<usize>,
}

impl RdsRecord {
    pub fn class(&self) -> ClassKey {
        ClassKey::new(self.degree, self.infected)
    }
}

/// Respondents in recruitment order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RdsSample {
    pub records: Vec<RdsRecord>,
    pub seed_ids: Vec<usize>,
    /// The recruitment queue emptied before the target size was reached and
    /// no replacement seed was drawn.
    pub died_out: bool,
    /// Replacement seeds added after die-outs.
    pub reseeds: usize,
}

impl RdsSample {
    pub fn from_records(records: Vec<RdsRecord>) -> Result<Self> {
        let seed_ids = records
            .iter()
            .filter(|r| r.recruiter.is_none())
            .map(|r| r.id)
            .collect();
        let s = Self {
            records,
            seed_ids,
            died_out: false,
            reseeds: 0,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn infected_count(&self) -> usize {
        self.records.iter().filter(|r| r.infected).count()
    }

    pub fn class_counts(&self) -> BTreeMap<ClassKey, u64> {
        let mut out = BTreeMap::new();
        for r in &self.records {
            *out.entry(r.class()).or_default() += 1;
        }
        out
    }

    /// Classes of the seeds, in seed order.
    pub fn seed_classes(&self) -> Vec<ClassKey> {
        let index = self.index();
        self.seed_ids
            .iter()
            .map(|id| self.records[index[id]].class())
            .collect()
    }

    fn index(&self) -> HashMap<usize, usize> {
        self.records.iter().enumerate().map(|(i, r)| (r.id, i)).collect()
    }

    /// Number of recruits of each respondent, aligned with `records`.
    pub fn offspring(&self) -> Vec<usize> {
        let index = self.index();
        let mut out = vec![0; self.records.len()];
        for r in &self.records {
            if let Some(p) = r.recruiter {
                if let Some(&i) = index.get(&p) {
                    out[i] += 1;
                }
            }
        }
        out
    }

    /// Observed offspring distribution, by wave and infection status when
    /// `by_wave` is set, otherwise pooled over waves. Counts above the
    /// coupon ceiling are clipped.
    pub fn empirical_offspring(&self, by_wave: bool) -> Result<OffspringTable> {
        let mut tallies = BTreeMap::<(u32, bool), [u64; MAX_OFFSPRING + 1]>::new();
        for (r, k) in self.records.iter().zip(self.offspring()) {
            let wave = if by_wave { r.wave } else { 0 };
            tallies.entry((wave, r.infected)).or_default()[k.min(MAX_OFFSPRING)] += 1;
        }
        OffspringTable::from_tallies(tallies)
    }

    /// Recruitment edges as (recruiter index, recruit index) into `records`.
    pub fn recruitment_edges(&self) -> Vec<(usize, usize)> {
        let index = self.index();
        self.records
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.recruiter.and_then(|p| index.get(&p)).map(|&p| (p, i)))
            .collect()
    }

    /// Structural checks: unique ids, seeds at wave 0, every recruiter sampled
    /// earlier, and recruits one wave after their recruiter.
    pub fn validate(&self) -> Result<()> {
        let mut seen = HashMap::with_capacity(self.records.len());
        for r in &self.records {
            match r.recruiter {
                None => {
                    if r.wave != 0 {
                        return Err(Error::Invariant(format!("seed {} at wave {}", r.id, r.wave)));
                    }
                }
                Some(p) => {
                    let Some(&pw) = seen.get(&p) else {
                        return Err(Error::Invariant(format!(
                            "respondent {} recruited by unknown or later respondent {p}",
                            r.id
                        )));
                    };
                    if r.wave != pw + 1 {
                        return Err(Error::Invariant(format!(
                            "respondent {} at wave {} but recruiter at wave {pw}",
                            r.id, r.wave
                        )));
                    }
                }
            }
            if seen.insert(r.id, r.wave).is_some() {
                return Err(Error::Invariant(format!("respondent {} sampled twice", r.id)));
            }
            if let Some(x) = r.cross_alters {
                if x > r.degree {
                    return Err(Error::Invariant(format!(
                        "respondent {} has {x} infected alters but degree {}",
                        r.id, r.degree
                    )));
                }
            }
        }
        let roots: Vec<usize> = self
            .records
            .iter()
            .filter(|r| r.recruiter.is_none())
            .map(|r| r.id)
            .collect();
        if roots != self.seed_ids {
            return Err(Error::Invariant("seed list does not match the recruitment roots".into()));
        }
        Ok(())
    }

    /// [`RdsSample::validate`] plus agreement with the network the sample was
    /// drawn from.
    pub fn validate_against(&self, net: &Network) -> Result<()> {
        self.validate()?;
        for r in &self.records {
            net.check_node(r.id)?;
            if net.degree(r.id) as u32 != r.degree || net.is_infected(r.id) != r.infected {
                return Err(Error::Invariant(format!(
                    "respondent {} disagrees with the network",
                    r.id
                )));
            }
            if let Some(x) = r.cross_alters {
                if node_cross_alters(net, r.id)? as u32 != x {
                    return Err(Error::Invariant(format!(
                        "respondent {} infected-alter count is wrong",
                        r.id
                    )));
                }
            }
            if let Some(p) = r.recruiter {
                if !net.has_edge(p, r.id) {
                    return Err(Error::Invariant(format!(
                        "recruitment {p} -> {} is not a network tie",
                        r.id
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: usize, wave: u32, recruiter: Option<usize>, infected: bool) -> RdsRecord {
        RdsRecord {
            id,
            degree: 2,
            infected,
            cross_alters: None,
            wave,
            recruiter,
        }
    }

    #[test]
    fn detects_broken_forests() {
        let good = vec![rec(5, 0, None, true), rec(3, 1, Some(5), false), rec(9, 2, Some(3), false)];
        let s = RdsSample::from_records(good.clone()).unwrap();
        assert_eq!(s.seed_ids, vec![5]);
        assert_eq!(s.offspring(), vec![1, 1, 0]);
        assert_eq!(s.recruitment_edges(), vec![(0, 1), (1, 2)]);

        let mut bad = good.clone();
        bad[2].wave = 3;
        assert!(RdsSample::from_records(bad).is_err());
        let mut bad = good.clone();
        bad[2].id = 5;
        assert!(RdsSample::from_records(bad).is_err());
        let mut bad = good.clone();
        bad.swap(1, 2);
        assert!(RdsSample::from_records(bad).is_err());
        let mut bad = good;
        bad[0].wave = 1;
        assert!(RdsSample::from_records(bad).is_err());
    }

    #[test]
    fn empirical_offspring_tables() {
        let s = RdsSample::from_records(vec![
            rec(0, 0, None, true),
            rec(1, 1, Some(0), true),
            rec(2, 1, Some(0), false),
            rec(3, 2, Some(1), false),
        ])
        .unwrap();
        let t = s.empirical_offspring(true).unwrap();
        assert_eq!(t.distribution(0, true), Some(&[0.0, 0.0, 1.0, 0.0]));
        assert_eq!(t.distribution(1, true), Some(&[0.0, 1.0, 0.0, 0.0]));
        assert_eq!(t.distribution(1, false), Some(&[1.0, 0.0, 0.0, 0.0]));
        let pooled = s.empirical_offspring(false).unwrap();
        assert_eq!(pooled.distribution(4, true), Some(&[0.0, 0.5, 0.5, 0.0]));
    }
}
