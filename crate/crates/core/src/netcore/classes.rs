use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Equivalence class of a node: its degree and infection status.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassKey {
    pub degree: u32,
    pub infected: bool,
}

impl ClassKey {
    pub fn new(degree: u32, infected: bool) -> Self {
        Self { degree, infected }
    }
}

impl fmt::Display for ClassKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.degree, u8::from(self.infected))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableScale {
    /// Integer node counts summing to the population size.
    Count,
    /// Design-based estimates; real-valued.
    Estimated,
}

/// Node counts (or estimates) by (degree, infection) class.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassTable {
    entries: BTreeMap<ClassKey, f64>,
    scale: TableScale,
}

impl ClassTable {
    pub fn new(scale: TableScale) -> Self {
        Self {
            entries: BTreeMap::new(),
            scale,
        }
    }

    pub fn from_counts<I: IntoIterator<Item = (ClassKey, u64)>>(counts: I) -> Self {
        let mut table = Self::new(TableScale::Count);
        for (key, c) in counts {
            if c > 0 {
                *table.entries.entry(key).or_insert(0.0) += c as f64;
            }
        }
        table
    }

    pub fn scale(&self) -> TableScale {
        self.scale
    }

    pub fn get(&self, key: ClassKey) -> f64 {
        self.entries.get(&key).copied().unwrap_or(0.0)
    }

    /// Set an entry. Negative or non-finite values are rejected; zero removes
    /// the class.
    pub fn set(&mut self, key: ClassKey, value: f64) -> Result<()> {
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "class {key} value {value} must be finite and nonnegative"
            )));
        }
        if value == 0.0 {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, value);
        }
        Ok(())
    }

    pub fn add(&mut self, key: ClassKey, value: f64) -> Result<()> {
        let v = self.get(key) + value;
        self.set(key, v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (ClassKey, f64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    pub fn classes(&self) -> impl Iterator<Item = ClassKey> + '_ {
        self.entries.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    /// Integer count of a class in a count-scaled table.
    pub fn count(&self, key: ClassKey) -> u64 {
        self.get(key).round() as u64
    }

    /// Sum of degrees over all nodes described by a count table.
    pub fn degree_total(&self) -> u64 {
        self.entries
            .iter()
            .map(|(k, &v)| u64::from(k.degree) * v.round() as u64)
            .sum()
    }

    /// Expand a count table into per-node degree and infection sequences.
    ///
    /// Nodes are laid out class by class in key order; any ordering is
    /// equivalent for the working model.
    pub fn to_sequences(&self) -> Result<(Vec<u32>, Vec<bool>)> {
        if self.scale != TableScale::Count {
            return Err(Error::InvalidParameter(
                "only count tables can be expanded into sequences".into(),
            ));
        }
        let mut degrees = Vec::new();
        let mut infected = Vec::new();
        for (key, v) in self.iter() {
            if (v - v.round()).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "class {key} has non-integer count {v}"
                )));
            }
            let c = v.round() as usize;
            degrees.extend(std::iter::repeat_n(key.degree, c));
            infected.extend(std::iter::repeat_n(key.infected, c));
        }
        Ok((degrees, infected))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequences_follow_key_order() {
        let t = ClassTable::from_counts([
            (ClassKey::new(2, true), 1),
            (ClassKey::new(1, false), 2),
            (ClassKey::new(3, false), 0),
        ]);
        assert_eq!(t.len(), 2);
        let (d, z) = t.to_sequences().unwrap();
        assert_eq!(d, vec![1, 1, 2]);
        assert_eq!(z, vec![false, false, true]);
        assert_eq!(t.degree_total(), 4);
    }

    #[test]
    fn estimated_tables_do_not_expand() {
        let mut t = ClassTable::new(TableScale::Estimated);
        t.set(ClassKey::new(1, true), 0.5).unwrap();
        assert!(t.to_sequences().is_err());
        assert!(t.set(ClassKey::new(1, true), -1.0).is_err());
    }
}
