use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::netcore::ClassKey;
use crate::rdssim::RdsRecord;

/// Inclusion probabilities by (degree, infection) class.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WeightTable {
    pi: BTreeMap<ClassKey, f64>,
    /// Iteration that produced the table; 0 for the starting weights.
    pub iteration: usize,
}

impl WeightTable {
    pub fn new(iteration: usize) -> Self {
        Self {
            pi: BTreeMap::new(),
            iteration,
        }
    }

    pub fn set(&mut self, key: ClassKey, pi: f64) -> Result<()> {
        if !(pi > 0.0 && pi <= 1.0) {
            return Err(Error::Invariant(format!("inclusion probability {pi} for class {key}")));
        }
        self.pi.insert(key, pi);
        Ok(())
    }

    pub fn get(&self, key: ClassKey) -> Option<f64> {
        self.pi.get(&key).copied()
    }

    pub fn require(&self, key: ClassKey) -> Result<f64> {
        self.get(key).ok_or(Error::MissingWeight(key))
    }

    /// Weight of `key`, or of the same-status class with the closest degree
    /// (the lower degree on ties) when `key` has none.
    pub fn nearest(&self, key: ClassKey) -> Option<f64> {
        if let Some(p) = self.get(key) {
            return Some(p);
        }
        self.pi
            .iter()
            .filter(|(k, _)| k.infected == key.infected)
            .min_by_key(|(k, _)| (k.degree.abs_diff(key.degree), k.degree))
            .map(|(_, &p)| p)
    }

    pub fn iter(&self) -> impl Iterator<Item = (ClassKey, f64)> + '_ {
        self.pi.iter().map(|(k, v)| (*k, *v))
    }

    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }
}

/// Ratio estimator `sum(z / pi) / sum(1 / pi)` with per-record weights.
pub fn hajek_by<F>(records: &[RdsRecord], mut pi: F) -> Result<f64>
where
    F: FnMut(&RdsRecord) -> Result<f64>,
{
    if records.is_empty() {
        return Err(Error::Empty("sample"));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for r in records {
        let p = pi(r)?;
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::Invariant(format!("weight {p} for respondent {}", r.id)));
        }
        den += 1.0 / p;
        if r.infected {
            num += 1.0 / p;
        }
    }
    Ok((num / den).clamp(0.0, 1.0))
}
