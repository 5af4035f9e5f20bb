mod common;

use common::naive_evaluate;
use polymat::corpus::{quadratic_chaos, random_gaussian_poly, random_multilinear};
use polymat::dist::Distribution;
use polymat::sampling::{sample_rng, sample_vector};
use polymat::{Error, Matrix, PolyMatrix};

#[test]
fn evaluate_matches_naive_oracle() {
    let mut rng = sample_rng(51, 0);
    let f = random_multilinear(&mut rng, 4, (3, 2), &[3], 4);
    let g = random_gaussian_poly(&mut rng, 4, (2, 2), 3, 6);
    for s in 0..20 {
        let x = sample_vector(&Distribution::Gaussian, 4, 52, s);
        assert!(
            f.evaluate(&x)
                .unwrap()
                .max_abs_diff(&naive_evaluate(&f, &x))
                < 1e-14
        );
        assert!(
            g.evaluate(&x)
                .unwrap()
                .max_abs_diff(&naive_evaluate(&g, &x))
                < 1e-14
        );
    }
}

#[test]
fn example_values() {
    let f = quadratic_chaos();
    let ones = f.evaluate(&[1.0, 1.0, 1.0]).unwrap();
    assert_eq!(
        ones,
        Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap()
    );
    assert!(f.evaluate(&[0.0; 3]).unwrap().is_zero());
    let x = [0.5, -2.0, 3.0];
    let want = Matrix::from_rows(&[
        vec![x[0] * x[1], x[1] * x[2]],
        vec![x[1] * x[2], x[0] * x[2]],
    ])
    .unwrap();
    assert_eq!(f.evaluate(&x).unwrap(), want);
}

#[test]
fn exactly_linear_in_each_coordinate() {
    let mut rng = sample_rng(53, 0);
    let f = random_multilinear(&mut rng, 5, (2, 2), &[1, 2, 3], 3);
    let x = sample_vector(&Distribution::Gaussian, 5, 54, 0);
    for i in 0..5 {
        let at = |v: f64| {
            let mut y = x.clone();
            y[i] = v;
            f.evaluate(&y).unwrap()
        };
        let (f0, f1) = (at(0.0), at(1.0));
        for alpha in [-3.0, 0.25, 7.0] {
            let mut line = f0.clone();
            let mut slope = f1.clone();
            slope.add_scaled(&f0, -1.0).unwrap();
            line.add_scaled(&slope, alpha).unwrap();
            assert!(at(alpha).max_abs_diff(&line) < 1e-12);
        }
    }
}

#[test]
fn decoupled_on_equal_copies_is_evaluate() {
    let mut rng = sample_rng(55, 0);
    let f = random_multilinear(&mut rng, 5, (2, 3), &[3], 5);
    let x = sample_vector(&Distribution::Rademacher, 5, 56, 0);
    let copies = vec![x.clone(), x.clone(), x.clone()];
    assert_eq!(
        f.evaluate_decoupled(&copies).unwrap(),
        f.evaluate(&x).unwrap()
    );
    let e = quadratic_chaos()
        .evaluate_decoupled(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]])
        .unwrap();
    assert_eq!(
        e,
        Matrix::from_rows(&[vec![0.5, 0.0], vec![0.0, 0.0]]).unwrap()
    );
}

/// Entrywise Monte Carlo mean within 4 standard errors of `expectation`.
fn check_expectation(f: &PolyMatrix, dist: Distribution, seed: u64) {
    let samples = 100_000;
    let (r, c) = f.dims();
    let mut sum = vec![0.0; r * c];
    let mut sq = vec![0.0; r * c];
    for s in 0..samples {
        let x = sample_vector(&dist, f.n(), seed, s);
        for (k, v) in f.evaluate(&x).unwrap().as_slice().iter().enumerate() {
            sum[k] += v;
            sq[k] += v * v;
        }
    }
    let e = f.expectation(&dist);
    let nf = samples as f64;
    for k in 0..r * c {
        let mean = sum[k] / nf;
        let var = (sq[k] / nf - mean * mean).max(0.0);
        let se = (var / nf).sqrt();
        assert!(
            (mean - e.as_slice()[k]).abs() <= 4.0 * se + 1e-12,
            "{dist}: entry {k}"
        );
    }
}

#[test]
fn expectation_agrees_with_sampling() {
    let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, -1.0]]).unwrap();
    let b = Matrix::from_rows(&[vec![0.5, 0.0], vec![1.0, 1.0]]).unwrap();
    let f = PolyMatrix::from_terms(
        2,
        (2, 2),
        false,
        [
            (vec![0, 0], a.clone()),
            (vec![0, 1], b),
            (vec![1, 1, 1, 1], a),
        ],
    )
    .unwrap();
    check_expectation(&f, Distribution::Gaussian, 57);
    check_expectation(&f, Distribution::pbiased(0.3).unwrap(), 58);
    let g = random_multilinear(&mut sample_rng(59, 0), 4, (2, 2), &[1, 2], 3);
    assert!(g.expectation(&Distribution::Rademacher).is_zero());
    check_expectation(&g, Distribution::Rademacher, 60);
}

#[test]
fn json_roundtrip_preserves_terms() {
    let mut rng = sample_rng(61, 0);
    for degrees in [&[1usize][..], &[2], &[1, 3]] {
        let f = random_multilinear(&mut rng, 6, (2, 3), degrees, 4);
        let back = PolyMatrix::parse(&f.to_json()).unwrap();
        assert_eq!(back.terms(), f.terms());
        assert_eq!(back, f);
    }
}

#[test]
fn schema_errors_name_the_term() {
    let dup = r#"{"n":3,"dims":[1,1],"multilinear":true,"terms":[
        {"vars":[1,2],"matrix":[[1]]},{"vars":[2,1],"matrix":[[2]]}]}"#;
    assert!(matches!(
        PolyMatrix::parse(dup),
        Err(Error::Schema { term: Some(1), .. })
    ));
    let range = r#"{"n":2,"dims":[1,1],"multilinear":true,"terms":[{"vars":[3],"matrix":[[1]]}]}"#;
    assert!(matches!(
        PolyMatrix::parse(range),
        Err(Error::Schema { term: Some(0), .. })
    ));
    let shape = r#"{"n":2,"dims":[1,2],"multilinear":true,"terms":[{"vars":[1],"matrix":[[1]]}]}"#;
    assert!(matches!(
        PolyMatrix::parse(shape),
        Err(Error::Schema { term: Some(0), .. })
    ));
    let repeat =
        r#"{"n":2,"dims":[1,1],"multilinear":true,"terms":[{"vars":[1,1],"matrix":[[1]]}]}"#;
    assert!(matches!(
        PolyMatrix::parse(repeat),
        Err(Error::Schema { term: Some(0), .. })
    ));
    assert!(PolyMatrix::parse("{").is_err());
}
