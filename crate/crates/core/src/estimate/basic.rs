use crate::error::{Error, Result};
use crate::rdssim::RdsSample;

use super::weights::{hajek_by, WeightTable};

/// Weighted prevalence estimate with class-level inclusion probabilities.
pub fn hajek(sample: &RdsSample, weights: &WeightTable) -> Result<f64> {
    hajek_by(&sample.records, |r| weights.require(r.class()))
}

/// Fraction of respondents infected.
pub fn naive_mean(sample: &RdsSample) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::Empty("sample"));
    }
    Ok(sample.infected_count() as f64 / sample.len() as f64)
}

/// Volz-Heckathorn estimator: inclusion probability proportional to degree.
pub fn vh_estimate(sample: &RdsSample) -> Result<f64> {
    hajek_by(&sample.records, |r| {
        if r.degree == 0 {
            Err(Error::ZeroDegree(r.id))
        } else {
            Ok(f64::from(r.degree))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::ClassKey;
    use crate::rdssim::RdsRecord;

    fn sample(rows: &[(u32, bool)]) -> RdsSample {
        RdsSample::from_records(
            rows.iter()
                .enumerate()
                .map(|(i, &(degree, infected))| RdsRecord {
                    id: i,
                    degree,
                    infected,
                    cross_alters: None,
                    wave: 0,
                    recruiter: None,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn hand_computed_values() {
        let s = sample(&[(1, true), (4, false)]);
        let mut w = WeightTable::new(0);
        w.set(ClassKey::new(1, true), 0.1).unwrap();
        w.set(ClassKey::new(4, false), 0.4).unwrap();
        assert!((hajek(&s, &w).unwrap() - 0.8).abs() < 1e-12);
        assert!((vh_estimate(&s).unwrap() - 0.8).abs() < 1e-12);

        let s = sample(&[(2, true), (1, false)]);
        assert!((vh_estimate(&s).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!(matches!(hajek(&s, &w), Err(Error::MissingWeight(_))));
        assert!(matches!(vh_estimate(&sample(&[(0, true)])), Err(Error::ZeroDegree(0))));
    }

    #[test]
    fn naive_means() {
        assert_eq!(naive_mean(&sample(&[(1, true), (2, true)])).unwrap(), 1.0);
        assert_eq!(naive_mean(&sample(&[(1, false)])).unwrap(), 0.0);
        let s = sample(&[(1, true), (2, true), (3, false), (3, false), (5, false)]);
        assert!((naive_mean(&s).unwrap() - 0.4).abs() < 1e-15);
        assert!(naive_mean(&RdsSample::default()).is_err());
    }

    #[test]
    fn equal_weights_give_sample_mean() {
        let s = sample(&[(3, true), (3, false), (3, false), (3, true), (3, true)]);
        assert!((vh_estimate(&s).unwrap() - 0.6).abs() < 1e-12);
        let mut w = WeightTable::new(0);
        w.set(ClassKey::new(3, true), 0.3).unwrap();
        w.set(ClassKey::new(3, false), 0.3).unwrap();
        assert!((hajek(&s, &w).unwrap() - 0.6).abs() < 1e-12);
    }
}
