use polymat::corpus::{quadratic_chaos, random_matrix, random_multilinear};
use polymat::sampling::{
    decoupling_ratio, estimate_moment, rosenthal_empirical, sample_rng, DecouplingMode, Quantity,
    SampleConfig,
};
use polymat::{Distribution, Matrix, PolyMatrix};

#[test]
fn estimates_are_identical_across_worker_counts() {
    let mut rng = sample_rng(91, 0);
    let f = random_multilinear(&mut rng, 6, (3, 3), &[2, 3], 4);
    let cfg = SampleConfig::new(Distribution::pbiased(0.3).unwrap(), 6, 3_000, 17, 2);
    let q = Quantity::Power { exponent: 8 };
    let base = estimate_moment(&f, &cfg.clone().with_threads(Some(1)), q).unwrap();
    for threads in [Some(2), Some(5), None] {
        let other = estimate_moment(&f, &cfg.clone().with_threads(threads), q).unwrap();
        assert_eq!(other, base);
        assert_eq!(other.mean.to_bits(), base.mean.to_bits());
    }
}

#[test]
fn linear_second_moment_is_unbiased() {
    let mut rng = sample_rng(92, 0);
    let coeffs: Vec<Matrix> = (0..5).map(|_| random_matrix(&mut rng, 3, 4)).collect();
    let exact: f64 = coeffs.iter().map(Matrix::frobenius_sq).sum();
    let f = PolyMatrix::from_terms(
        5,
        (3, 4),
        true,
        coeffs.into_iter().enumerate().map(|(k, c)| (vec![k], c)),
    )
    .unwrap();
    for (i, dist) in [
        Distribution::Rademacher,
        Distribution::Gaussian,
        Distribution::pbiased(0.2).unwrap(),
    ]
    .into_iter()
    .enumerate()
    {
        let cfg = SampleConfig::new(dist, 5, 20_000, 93 + i as u64, 1);
        let est = estimate_moment(&f, &cfg, Quantity::Power { exponent: 2 }).unwrap();
        assert!(
            (est.mean - exact).abs() <= 4.0 * est.stderr,
            "{dist}: {} vs {exact}",
            est.mean
        );
    }
}

#[test]
fn example_frobenius_moment() {
    let f = quadratic_chaos();
    let cfg = SampleConfig::new(Distribution::Rademacher, 3, 100_000, 7, 1);
    let est = estimate_moment(&f, &cfg, Quantity::Power { exponent: 2 }).unwrap();
    assert!((est.mean - 4.0).abs() < 1e-9);
}

#[test]
fn decoupling_and_rosenthal_hold_on_small_cases() {
    let f = quadratic_chaos();
    let cfg = SampleConfig::new(Distribution::Rademacher, 3, 5_000, 5, 2);
    for mode in [DecouplingMode::Norm, DecouplingMode::Power] {
        assert!(decoupling_ratio(&f, &cfg, mode).unwrap().holds);
    }
    let mut rng = sample_rng(94, 0);
    let coeffs: Vec<Matrix> = (0..4).map(|_| random_matrix(&mut rng, 4, 4)).collect();
    let cfg = SampleConfig::new(Distribution::Gaussian, 4, 5_000, 6, 2);
    assert!(
        rosenthal_empirical(&coeffs, &Distribution::Gaussian, 2, &cfg)
            .unwrap()
            .holds
    );
}

#[test]
fn invalid_configs_are_rejected() {
    let f = quadratic_chaos();
    let cfg = SampleConfig::new(Distribution::Rademacher, 3, 0, 1, 2);
    assert!(estimate_moment(&f, &cfg, Quantity::Spectral).is_err());
    let wrong_n = SampleConfig::new(Distribution::Rademacher, 4, 10, 1, 2);
    assert!(estimate_moment(&f, &wrong_n, Quantity::Spectral).is_err());
}
