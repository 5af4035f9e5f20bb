//! Shipped instances and seeded random generators.

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::graph::Shape;
use crate::linalg::Matrix;
use crate::polymatrix::PolyMatrix;

pub const QUADRATIC_CHAOS_JSON: &str = include_str!("../data/quadratic_chaos.json");
pub const EDGE_JSON: &str = include_str!("../data/edge.json");
pub const PATH_JSON: &str = include_str!("../data/path.json");
pub const TRIANGLE_JSON: &str = include_str!("../data/triangle.json");

/// Order-2 Rademacher chaos on three variables with 2×2 coefficients.
pub fn quadratic_chaos() -> PolyMatrix {
    PolyMatrix::parse(QUADRATIC_CHAOS_JSON).expect("shipped polynomial parses")
}

/// Single edge `u−v`, `U = (u)`, `V = (v)`.
pub fn edge_shape() -> Shape {
    Shape::parse(EDGE_JSON).expect("shipped shape parses")
}

/// Path `u−w−v` with `U = (u)`, `V = (v)`; `w` is vertex 1.
pub fn path_shape() -> Shape {
    Shape::parse(PATH_JSON).expect("shipped shape parses")
}

/// Triangle with singleton boundaries on two of its corners.
pub fn triangle_shape() -> Shape {
    Shape::parse(TRIANGLE_JSON).expect("shipped shape parses")
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    let data = (0..rows * cols)
        .map(|_| rng.sample(StandardNormal))
        .collect();
    Matrix::new(rows, cols, data).expect("normal draws are finite")
}

/// Multilinear polynomial with `terms_per_degree` random keys of each listed
/// degree and Gaussian coefficient matrices. Colliding keys are merged.
pub fn random_multilinear(
    rng: &mut ChaCha8Rng,
    n: usize,
    dims: (usize, usize),
    degrees: &[usize],
    terms_per_degree: usize,
) -> PolyMatrix {
    let mut p = PolyMatrix::zero(n, dims, true);
    for &d in degrees {
        for _ in 0..terms_per_degree {
            let mut key = sample(rng, n, d).into_vec();
            key.sort_unstable();
            let c = random_matrix(rng, dims.0, dims.1);
            p.add_term(key, &c, 1.0);
        }
    }
    p
}

/// Homogeneous degree-`d` polynomial whose keys may repeat variables.
pub fn random_gaussian_poly(
    rng: &mut ChaCha8Rng,
    n: usize,
    dims: (usize, usize),
    d: usize,
    terms: usize,
) -> PolyMatrix {
    let mut p = PolyMatrix::zero(n, dims, false);
    for _ in 0..terms {
        let mut key: Vec<usize> = (0..d).map(|_| rng.random_range(0..n)).collect();
        key.sort_unstable();
        let c = random_matrix(rng, dims.0, dims.1);
        p.add_term(key, &c, 1.0);
    }
    p
}

/// Random shape on `k` vertices: each pair is an edge with probability
/// `edge_p`; `U` and `V` are random tuples of length 1 or 2.
pub fn random_shape(rng: &mut ChaCha8Rng, k: usize, edge_p: f64) -> Shape {
    let mut edges = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            if rng.random::<f64>() < edge_p {
                edges.push((a, b));
            }
        }
    }
    let boundary = |rng: &mut ChaCha8Rng| {
        let len = rng.random_range(1..=2.min(k));
        sample(rng, k, len).into_vec()
    };
    let u = boundary(rng);
    let v = boundary(rng);
    Shape::new(k, edges, u, v).expect("generated shape is valid")
}
