mod common;

use std::collections::BTreeMap;

use common::{dense_full_block, rel, schatten_oracle};
use polymat::blocks::{block_schatten_power, build_block, build_gaussian_block, Block};
use polymat::bounds::triples;
use polymat::corpus::{quadratic_chaos, random_gaussian_poly, random_multilinear};
use polymat::sampling::sample_rng;
use polymat::{Matrix, PolyMatrix};

fn instances() -> Vec<PolyMatrix> {
    let mut rng = sample_rng(71, 0);
    let mut out = vec![quadratic_chaos()];
    for d in 1..=3 {
        for n in [d + 1, 5] {
            out.push(random_multilinear(&mut rng, n, (2, 3), &[d], 4));
        }
    }
    out
}

#[test]
fn full_depth_blocks_match_dense_oracle() {
    for f in instances() {
        let d = f.homogeneous_degree().unwrap();
        for (a, b, c) in triples(d) {
            let block = build_block(&f, a, b, c).unwrap();
            let dense = block.to_dense(1 << 20).unwrap();
            let oracle = dense_full_block(&f, a, b, c);
            assert_eq!(dense.shape(), oracle.shape());
            assert!(
                dense.max_abs_diff(&oracle) <= 1e-15 * (1.0 + oracle.max_abs()),
                "({a},{b},{c})"
            );
            for two_t in [2, 4, 6] {
                let sparse = block_schatten_power(&block, two_t).unwrap();
                assert!(
                    rel(sparse, schatten_oracle(&oracle, two_t)) < 1e-9,
                    "({a},{b},{c}) p={two_t}"
                );
            }
        }
    }
}

#[test]
fn example_f110_against_dense() {
    let f = quadratic_chaos();
    let block = build_block(&f, 1, 1, 0).unwrap();
    assert_eq!(block.logical_dims(), (6, 6));
    let dense = dense_full_block(&f, 1, 1, 0);
    assert!(
        rel(
            block_schatten_power(&block, 4).unwrap(),
            schatten_oracle(&dense, 4)
        ) < 1e-9
    );
    for i in 0..3 {
        assert!(block.get(&[i], &[i]).is_none());
    }
}

#[test]
fn dimension_law_at_every_depth() {
    let mut rng = sample_rng(72, 0);
    let f = random_multilinear(&mut rng, 4, (2, 3), &[1, 2, 3], 3);
    for depth in 0..=4 {
        for (a, b, c) in triples(depth) {
            let block = build_block(&f, a, b, c).unwrap();
            let want = (2 * 4u128.pow((a + c) as u32), 3 * 4u128.pow((b + c) as u32));
            assert_eq!(block.logical_dims(), want);
        }
    }
}

#[test]
fn transpose_duality() {
    for f in instances() {
        let ft = f.transpose();
        let d = f.homogeneous_degree().unwrap();
        for (a, b, c) in triples(d) {
            let x = block_schatten_power(&build_block(&f, a, b, c).unwrap(), 4).unwrap();
            let y = block_schatten_power(&build_block(&ft, b, a, c).unwrap(), 4).unwrap();
            assert!(rel(x, y) < 1e-9);
        }
    }
}

#[test]
fn full_depth_values_are_scaled_coefficients() {
    for f in instances() {
        let d = f.homogeneous_degree().unwrap();
        let fact: f64 = (1..=d).map(|k| k as f64).product();
        let allowed: Vec<Matrix> = f.terms().values().map(|c| c.scaled(1.0 / fact)).collect();
        for (a, b, c) in triples(d) {
            for block in build_block(&f, a, b, c).unwrap().blocks().values() {
                let Block::Value(m) = block else {
                    panic!("full-depth block is not deterministic")
                };
                assert!(allowed.iter().any(|x| x.max_abs_diff(m) <= 1e-15));
            }
        }
    }
}

#[test]
fn diagonal_step_is_dominated() {
    for f in instances() {
        let d = f.homogeneous_degree().unwrap();
        for (a, b, c) in triples(d - 1) {
            let p = |a, b, c| block_schatten_power(&build_block(&f, a, b, c).unwrap(), 8).unwrap();
            let lhs = p(a, b, c + 1);
            assert!(
                lhs <= (p(a + 1, b, c) + p(a, b + 1, c)) * (1.0 + 1e-12),
                "({a},{b},{c})"
            );
        }
    }
}

/// Dense `P_{a,b}` at `a + b = deg P` from literal iterated derivatives:
/// `∂_{i_1} ⋯ ∂_{i_d} x^S = Π mult!` when the indices form the multiset `S`.
fn gaussian_dense(p: &PolyMatrix, a: usize, b: usize) -> Matrix {
    let n = p.n();
    let (r0, c0) = p.dims();
    let tuples = |len: usize| -> Vec<Vec<usize>> {
        (0..n.pow(len as u32))
            .map(|mut idx| {
                (0..len)
                    .map(|_| {
                        let x = idx % n;
                        idx /= n;
                        x
                    })
                    .collect()
            })
            .collect()
    };
    let pos = |key: &[usize]| key.iter().rev().fold(0, |acc, &k| acc * n + k);
    let mut out = Matrix::zeros(r0 * n.pow(a as u32), c0 * n.pow(b as u32));
    for i in tuples(a) {
        for j in tuples(b) {
            let mut s: Vec<usize> = i.iter().chain(&j).copied().collect();
            s.sort_unstable();
            let Some(coef) = p.terms().get(&s) else {
                continue;
            };
            let mut counts = BTreeMap::new();
            for &x in &s {
                *counts.entry(x).or_insert(0usize) += 1;
            }
            let w: f64 = counts
                .values()
                .map(|&m| (1..=m).product::<usize>() as f64)
                .product();
            for u in 0..r0 {
                for v in 0..c0 {
                    out[(pos(&i) * r0 + u, pos(&j) * c0 + v)] += w * coef[(u, v)];
                }
            }
        }
    }
    out
}

#[test]
fn gaussian_blocks_match_literal_derivatives() {
    let mut rng = sample_rng(73, 0);
    for d in 1..=3 {
        let p = random_gaussian_poly(&mut rng, 3, (2, 2), d, 5);
        for a in 0..=d {
            let block = build_gaussian_block(&p, a, d - a);
            let dense = block.to_dense(1 << 20).unwrap();
            assert!(
                dense.max_abs_diff(&gaussian_dense(&p, a, d - a)) < 1e-14,
                "d={d} a={a}"
            );
            let power = block_schatten_power(&block, 4).unwrap();
            assert!(rel(power, schatten_oracle(&dense, 4)) < 1e-9);
        }
    }
}
