use rdsma::harness::{
    replicate_sample, run_sensitivity_n, run_study, write_skipped_csv, write_study_csv, Estimator, StudySpec,
};
use rdsma::netgen::MixingSpec;
use rdsma::rdssim::{SamplingDesign, SeedMode};

fn net(n: usize, r: f64) -> MixingSpec {
    MixingSpec {
        node_count: n,
        homophily_r: r,
        ..MixingSpec::default()
    }
}

fn design(n: usize, seeds: usize, mode: SeedMode) -> SamplingDesign {
    SamplingDesign {
        n,
        n_seeds: seeds,
        seed_mode: mode,
        ..SamplingDesign::default()
    }
}

#[test]
fn reruns_give_identical_csv_and_infeasible_cells_are_skipped() {
    let infeasible = MixingSpec {
        node_count: 20,
        prevalence: 0.5,
        mean_degree: 12.0,
        homophily_r: 1000.0,
        activity_w: 1.0,
    };
    let spec = StudySpec {
        networks: vec![net(200, 3.0), infeasible],
        designs: vec![design(80, 5, SeedMode::PpsDegreeAll)],
        replications: 6,
        master_seed: 77,
        ..StudySpec::default()
    };
    let csv = |spec: &StudySpec| {
        let res = run_study(spec).unwrap();
        let mut a = Vec::new();
        write_study_csv(&res, &mut a).unwrap();
        let mut b = Vec::new();
        write_skipped_csv(&res, &mut b).unwrap();
        (res, String::from_utf8(a).unwrap(), String::from_utf8(b).unwrap())
    };
    let (res, first, skipped) = csv(&spec);
    let (_, second, _) = csv(&spec);
    assert_eq!(first, second);
    assert_eq!(res.skipped.len(), 1);
    assert_eq!(res.skipped[0].0, 1);
    assert_eq!(skipped.lines().count(), 2);
    assert_eq!(res.rows.len(), 3);
    assert!(res.rows.iter().all(|r| r.cell == 0 && r.replications + r.failures == 6));
    let other_seed = StudySpec { master_seed: 78, ..spec };
    assert_ne!(csv(&other_seed).1, first);
}

#[test]
fn assumed_size_equal_to_sample_size_reduces_to_sample_mean() {
    let spec = StudySpec {
        networks: vec![net(300, 5.0)],
        designs: vec![design(150, 10, SeedMode::PpsDegreeInfectedOnly)],
        estimators: vec![Estimator::Mean, Estimator::Ma],
        replications: 12,
        master_seed: 5,
        ..StudySpec::default()
    };
    let naive = run_study(&StudySpec {
        estimators: vec![Estimator::Mean],
        ..spec.clone()
    })
    .unwrap()
    .rows[0]
        .mean_estimate;
    let sens = run_sensitivity_n(&spec, &[150, 300]).unwrap();
    assert_eq!(sens.rows.len(), 2);
    let at_n = sens.rows[0].mean_estimate;
    let at_truth = sens.rows[1].mean_estimate;
    assert_eq!(sens.rows[0].assumed_pop_size, 150);
    assert!((at_n - naive).abs() < 0.002, "{at_n} vs sample mean {naive}");
    assert!((at_n - naive).abs() < (at_truth - naive).abs());
    // Every assumed size sees the same samples.
    for rep in 0..3 {
        assert_eq!(replicate_sample(&spec, 0, rep).unwrap(), replicate_sample(&spec, 0, rep).unwrap());
    }
    assert!(run_sensitivity_n(&spec, &[100]).is_err());
}

#[test]
fn small_sampling_fraction_is_insensitive_to_assumed_size() {
    let spec = StudySpec {
        networks: vec![net(1000, 5.0)],
        designs: vec![design(100, 5, SeedMode::PpsDegreeAll)],
        estimators: vec![Estimator::Ma],
        replications: 24,
        master_seed: 9,
        ..StudySpec::default()
    };
    let sens = run_sensitivity_n(&spec, &[700, 1000, 1500]).unwrap();
    let means: Vec<f64> = sens.rows.iter().map(|r| r.mean_estimate).collect();
    let spread = means.iter().cloned().fold(f64::MIN, f64::max) - means.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread < 0.01, "{means:?}");
}

#[test]
fn fewer_seeds_mean_more_waves_and_less_seed_bias() {
    let spec = StudySpec {
        networks: vec![net(1000, 5.0)],
        designs: vec![
            design(500, 20, SeedMode::PpsDegreeInfectedOnly),
            design(500, 6, SeedMode::PpsDegreeInfectedOnly),
        ],
        estimators: vec![Estimator::Mean],
        replications: 200,
        master_seed: 12,
        ..StudySpec::default()
    };
    let res = run_study(&spec).unwrap();
    let many = res.row(0, Estimator::Mean).unwrap().bias;
    let few = res.row(1, Estimator::Mean).unwrap().bias;
    assert!(many > 0.0 && few < many, "20 seeds {many}, 6 seeds {few}");
}
