use crate::error::{Error, Result};

use super::sample::RdsSample;

/// Infected-alter counts estimated from who recruited whom.
///
/// For each status `l`, `p(l)` is the share of recruitment edges touching a
/// status-`l` respondent that join the two statuses. A respondent is credited
/// with `d * p(z)` alters of the other status, so the estimate is `d * p(0)`
/// for uninfected respondents and `d * (1 - p(1))` for infected ones. A status
/// touched by no recruitment edge uses the share over all edges.
pub fn estimate_x_from_referrals(sample: &RdsSample) -> Result<Vec<f64>> {
    let edges = sample.recruitment_edges();
    if edges.is_empty() {
        return Err(Error::NoRecruitmentEdges);
    }
    let mut touching = [0usize; 2];
    let mut crossing = [0usize; 2];
    for &(a, b) in &edges {
        let (za, zb) = (sample.records[a].infected, sample.records[b].infected);
        let cross = za != zb;
        for z in if cross { vec![za, zb] } else { vec![za] } {
            touching[z as usize] += 1;
            crossing[z as usize] += cross as usize;
        }
    }
    let overall = crossing[0].max(crossing[1]) as f64 / edges.len() as f64;
    let share = |z: usize| {
        if touching[z] == 0 {
            overall
        } else {
            crossing[z] as f64 / touching[z] as f64
        }
    };
    let p = [share(0), share(1)];
    Ok(sample
        .records
        .iter()
        .map(|r| {
            let d = f64::from(r.degree);
            let other = d * p[r.infected as usize];
            if r.infected {
                d - other
            } else {
                other
            }
        })
        .collect())
}

/// Observed infected-alter counts, with referral-based estimates filling any
/// gaps.
pub fn infected_alters(sample: &RdsSample) -> Result<Vec<f64>> {
    if sample.records.iter().all(|r| r.cross_alters.is_some()) {
        return Ok(sample
            .records
            .iter()
            .map(|r| f64::from(r.cross_alters.unwrap_or(0)))
            .collect());
    }
    let est = estimate_x_from_referrals(sample)?;
    Ok(sample
        .records
        .iter()
        .zip(est)
        .map(|(r, e)| r.cross_alters.map_or(e, f64::from))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgen::{gen_bernoulli_mixing, MixingSpec};
    use crate::rdssim::{run_rds, select_seeds, RdsRecord, SamplingDesign};
    use crate::rng::seeded;

    fn rec(id: usize, degree: u32, infected: bool, recruiter: Option<usize>, wave: u32) -> RdsRecord {
        RdsRecord {
            id,
            degree,
            infected,
            cross_alters: None,
            wave,
            recruiter,
        }
    }

    #[test]
    fn all_cross_recruitment() {
        let s = RdsSample::from_records(vec![
            rec(0, 4, true, None, 0),
            rec(1, 3, false, Some(0), 1),
            rec(2, 5, true, Some(1), 2),
        ])
        .unwrap();
        assert_eq!(estimate_x_from_referrals(&s).unwrap(), vec![0.0, 3.0, 0.0]);
    }

    #[test]
    fn no_cross_recruitment() {
        let s = RdsSample::from_records(vec![
            rec(0, 4, true, None, 0),
            rec(1, 3, true, Some(0), 1),
            rec(2, 5, false, None, 0),
            rec(3, 2, false, Some(2), 1),
        ])
        .unwrap();
        assert_eq!(estimate_x_from_referrals(&s).unwrap(), vec![4.0, 3.0, 0.0, 0.0]);
        let seeds_only = RdsSample::from_records(vec![rec(0, 4, true, None, 0)]).unwrap();
        assert!(matches!(
            estimate_x_from_referrals(&seeds_only),
            Err(Error::NoRecruitmentEdges)
        ));
    }

    #[test]
    fn beats_the_uninformed_guess() {
        let spec = MixingSpec {
            node_count: 400,
            homophily_r: 5.0,
            ..Default::default()
        };
        let net = gen_bernoulli_mixing(&spec, &mut seeded(1)).unwrap();
        let design = SamplingDesign {
            n: 350,
            n_seeds: 5,
            ..SamplingDesign::default()
        };
        let seeds = select_seeds(&net, &design, &mut seeded(2)).unwrap();
        let mut s = run_rds(&net, &design, &seeds, &mut seeded(3)).unwrap();
        let truth: Vec<f64> = s.records.iter().map(|r| f64::from(r.cross_alters.unwrap())).collect();
        for r in &mut s.records {
            r.cross_alters = None;
        }
        let est = infected_alters(&s).unwrap();
        let n = truth.len() as f64;
        let err: f64 = est.iter().zip(&truth).map(|(e, t)| (e - t).abs()).sum::<f64>() / n;
        let naive: f64 = s
            .records
            .iter()
            .zip(&truth)
            .map(|(r, t)| (f64::from(r.degree) / 2.0 - t).abs())
            .sum::<f64>()
            / n;
        assert!(err < naive, "{err} vs {naive}");
    }
}
