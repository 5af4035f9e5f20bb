mod common;

use common::{bfs_separates, brute_graph_matrix, exhaustive_min_separator};
use polymat::corpus::{edge_shape, path_shape, random_shape, triangle_shape};
use polymat::graph::{
    build_graph_matrix, min_vertex_separator, pair_count, shape_bound, to_polymatrix, Shape,
};
use polymat::sampling::{sample_rng, sample_vector};
use polymat::{Distribution, Error};

fn shapes() -> Vec<Shape> {
    let mut rng = sample_rng(101, 0);
    let mut out = vec![edge_shape(), path_shape(), triangle_shape()];
    for k in [2, 3, 3, 4, 4] {
        out.push(random_shape(&mut rng, k, 0.6));
    }
    out
}

#[test]
fn matrix_matches_brute_force_enumeration() {
    for shape in shapes() {
        for n in [shape.k(), 6] {
            let g = sample_vector(&Distribution::Gaussian, pair_count(n), 102, n as u64);
            let fast = build_graph_matrix(&shape, n, &g).unwrap();
            let slow = brute_graph_matrix(&shape, n, &g);
            assert!(fast.max_abs_diff(&slow) < 1e-12, "{}", shape.to_json());
        }
    }
}

#[test]
fn polynomial_form_agrees() {
    for shape in shapes() {
        let n = 5;
        let p = to_polymatrix(&shape, n).unwrap();
        for s in 0..3 {
            let g = sample_vector(&Distribution::Rademacher, pair_count(n), 103, s);
            assert!(
                p.evaluate(&g)
                    .unwrap()
                    .max_abs_diff(&build_graph_matrix(&shape, n, &g).unwrap())
                    < 1e-12
            );
        }
    }
}

#[test]
fn exactly_linear_in_each_edge_variable() {
    let shape = triangle_shape();
    let n = 5;
    let g = sample_vector(&Distribution::Gaussian, pair_count(n), 104, 0);
    for e in 0..pair_count(n) {
        let at = |v: f64| {
            let mut h = g.clone();
            h[e] = v;
            build_graph_matrix(&shape, n, &h).unwrap()
        };
        let (m0, m1, m3) = (at(0.0), at(1.0), at(3.0));
        let mut line = m0.clone();
        let mut slope = m1.clone();
        slope.add_scaled(&m0, -1.0).unwrap();
        line.add_scaled(&slope, 3.0).unwrap();
        assert!(m3.max_abs_diff(&line) < 1e-12);
    }
}

#[test]
fn separators_match_exhaustive_bfs_oracle() {
    let mut rng = sample_rng(105, 0);
    for i in 0..200 {
        let k = 2 + i % 7;
        let shape = random_shape(&mut rng, k, 0.4);
        let sep = min_vertex_separator(&shape).unwrap();
        assert!(bfs_separates(&shape, &sep.separator), "{}", shape.to_json());
        assert_eq!(sep.size, exhaustive_min_separator(&shape));
    }
}

#[test]
fn hand_separators() {
    assert_eq!(
        min_vertex_separator(&path_shape()).unwrap().separator,
        vec![0]
    );
    assert_eq!(min_vertex_separator(&edge_shape()).unwrap().size, 1);
    let both = Shape::new(3, vec![(0, 2), (1, 2)], vec![0, 1], vec![1, 0]).unwrap();
    assert_eq!(min_vertex_separator(&both).unwrap().separator, vec![0, 1]);
    let big = Shape::new(17, vec![(0, 1)], vec![0], vec![1]).unwrap();
    assert!(matches!(
        min_vertex_separator(&big),
        Err(Error::ResourceCap { .. })
    ));
}

#[test]
fn bound_nonincreasing_in_separator_size() {
    let thin = Shape::new(3, vec![(0, 1), (0, 2)], vec![1], vec![2]).unwrap();
    let thick = Shape::new(3, vec![(0, 1), (0, 2)], vec![0, 1], vec![1, 0]).unwrap();
    let (s1, s2) = (
        min_vertex_separator(&thin).unwrap().size,
        min_vertex_separator(&thick).unwrap().size,
    );
    assert!(s1 < s2);
    for n in [6, 10, 40] {
        let a = shape_bound(&thin, n, 0.5, 2, 3.0).unwrap();
        let b = shape_bound(&thick, n, 0.5, 2, 3.0).unwrap();
        assert!(b.report.log_total <= a.report.log_total);
    }
}

#[test]
fn single_edge_is_adjacency() {
    let n = 6;
    let g = sample_vector(&Distribution::Rademacher, pair_count(n), 106, 0);
    let m = build_graph_matrix(&edge_shape(), n, &g).unwrap();
    assert!(m.is_symmetric(0.0));
    assert!((0..n).all(|i| m[(i, i)] == 0.0));
    assert!(m.as_slice().iter().filter(|v| v.abs() == 1.0).count() == n * (n - 1));
}
