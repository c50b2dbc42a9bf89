use rdsma::bootstrap::{parametric_bootstrap, BootstrapConfig, BootstrapMode};
use rdsma::estimate::{ma_estimate, MaConfig, OffspringSource};
use rdsma::netgen::{gen_bernoulli_mixing, MixingSpec};
use rdsma::rdssim::{run_rds, select_seeds, SamplingDesign};
use rdsma::rng::seeded;

#[test]
fn fast_and_full_standard_errors_agree() {
    let spec = MixingSpec {
        node_count: 300,
        homophily_r: 3.0,
        ..MixingSpec::default()
    };
    let design = SamplingDesign {
        n: 120,
        n_seeds: 6,
        ..SamplingDesign::default()
    };
    let mut r = seeded(404);
    let net = gen_bernoulli_mixing(&spec, &mut r).unwrap();
    let seeds = select_seeds(&net, &design, &mut r).unwrap();
    let sample = run_rds(&net, &design, &seeds, &mut r).unwrap();
    let mut ma = MaConfig {
        iterations: 2,
        m1: 5,
        m2: 5,
        pop_size: 300,
        offspring: OffspringSource::Design,
        ..MaConfig::default()
    };
    ma.fit.tetrad_n = 10_000;
    let fit = ma_estimate(&sample, &design, &ma, &mut r).unwrap();
    let se = |mode| {
        let cfg = BootstrapConfig {
            replicates: 100,
            mode,
            ..BootstrapConfig::default()
        };
        let b = parametric_bootstrap(&fit, &design, &cfg, &ma, &mut seeded(405)).unwrap();
        assert_eq!(b.failures, 0);
        assert_eq!(b.draws.len(), 100);
        b.se
    };
    let (fast, full) = (se(BootstrapMode::Fast), se(BootstrapMode::Full));
    assert!((fast - full).abs() <= 0.25 * full, "fast {fast}, full {full}");
}
