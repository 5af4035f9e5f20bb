//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use polymat::graph::Shape;
use polymat::{Matrix, PolyMatrix};

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let scale: f64 = m.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q] == 0.0 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Gram matrix on the smaller side, as nested rows.
pub fn small_gram(a: &Matrix) -> Vec<Vec<f64>> {
    let (r, c) = a.shape();
    if r <= c {
        (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| (0..c).map(|k| a[(i, k)] * a[(j, k)]).sum())
                    .collect()
            })
            .collect()
    } else {
        (0..c)
            .map(|i| {
                (0..c)
                    .map(|j| (0..r).map(|k| a[(k, i)] * a[(k, j)]).sum())
                    .collect()
            })
            .collect()
    }
}

/// `Σ σ^{2t}` from Jacobi eigenvalues of the Gram matrix.
pub fn schatten_oracle(a: &Matrix, two_t: u32) -> f64 {
    let t = (two_t / 2) as i32;
    jacobi_eigenvalues(&small_gram(a))
        .iter()
        .map(|l| l.max(0.0).powi(t))
        .sum()
}

/// Singular values, descending.
pub fn singular_oracle(a: &Matrix) -> Vec<f64> {
    let mut s: Vec<f64> = jacobi_eigenvalues(&small_gram(a))
        .iter()
        .map(|l| l.max(0.0).sqrt())
        .collect();
    s.reverse();
    s
}

pub fn rel(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

/// `Σ_S C_S Π_{i∈S} x_i`, term by term.
pub fn naive_evaluate(f: &PolyMatrix, x: &[f64]) -> Matrix {
    let (r, c) = f.dims();
    let mut out = vec![0.0; r * c];
    for (key, m) in f.terms() {
        let w: f64 = key.iter().map(|&i| x[i]).product();
        for (o, v) in out.iter_mut().zip(m.as_slice()) {
            *o += w * v;
        }
    }
    Matrix::new(r, c, out).unwrap()
}

/// Every tuple in `0..n` of length `len`, first entry fastest.
fn tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    let total = n.pow(len as u32);
    (0..total)
        .map(|mut idx| {
            (0..len)
                .map(|_| {
                    let d = idx % n;
                    idx /= n;
                    d
                })
                .collect()
        })
        .collect()
}

fn little_endian(n: usize, key: &[usize]) -> usize {
    key.iter().rev().fold(0, |acc, &k| acc * n + k)
}

fn factorial(d: usize) -> f64 {
    (1..=d).map(|k| k as f64).product()
}

/// Dense full-depth block `F_{a,b,c}` of a homogeneous multilinear `F`:
/// block `((i,k),(j,k))` holds `C_S / d!` when `i, j, k` are disjoint
/// distinct indices forming the key `S`.
pub fn dense_full_block(f: &PolyMatrix, a: usize, b: usize, c: usize) -> Matrix {
    let n = f.n();
    let d = a + b + c;
    let (r0, c0) = f.dims();
    let rows = r0 * n.pow((a + c) as u32);
    let cols = c0 * n.pow((b + c) as u32);
    let mut out = Matrix::zeros(rows, cols);
    for i in tuples(n, a) {
        for j in tuples(n, b) {
            for k in tuples(n, c) {
                let mut s: Vec<usize> = i.iter().chain(&j).chain(&k).copied().collect();
                s.sort_unstable();
                if s.windows(2).any(|w| w[0] == w[1]) {
                    continue;
                }
                let Some(coef) = f.terms().get(&s) else {
                    continue;
                };
                let row_key: Vec<usize> = i.iter().chain(&k).copied().collect();
                let col_key: Vec<usize> = j.iter().chain(&k).copied().collect();
                let (br, bc) = (
                    little_endian(n, &row_key) * r0,
                    little_endian(n, &col_key) * c0,
                );
                for p in 0..r0 {
                    for q in 0..c0 {
                        out[(br + p, bc + q)] += coef[(p, q)] / factorial(d);
                    }
                }
            }
        }
    }
    out
}

/// Whether removing `s` disconnects `U` from `V`, by breadth-first search.
pub fn bfs_separates(shape: &Shape, s: &[usize]) -> bool {
    let k = shape.k();
    let mut adj = vec![Vec::new(); k];
    for &(a, b) in shape.edges() {
        adj[a].push(b);
        adj[b].push(a);
    }
    let blocked: Vec<bool> = (0..k).map(|x| s.contains(&x)).collect();
    let mut seen = vec![false; k];
    let mut queue = VecDeque::new();
    for &u in shape.u() {
        if !blocked[u] && !seen[u] {
            seen[u] = true;
            queue.push_back(u);
        }
    }
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if !blocked[y] && !seen[y] {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    shape.v().iter().all(|&v| !seen[v])
}

/// Minimum separator size over all `2^k` subsets.
pub fn exhaustive_min_separator(shape: &Shape) -> usize {
    let k = shape.k();
    (0..1usize << k)
        .filter_map(|mask| {
            let s: Vec<usize> = (0..k).filter(|&x| mask >> x & 1 == 1).collect();
            bfs_separates(shape, &s).then_some(s.len())
        })
        .min()
        .unwrap()
}

/// Graph matrix by scanning all of `[n]^k` and keeping injective maps.
pub fn brute_graph_matrix(shape: &Shape, n: usize, g: &[f64]) -> Matrix {
    let mut pairs = HashMap::new();
    for i in 0..n {
        for j in i + 1..n {
            let next = pairs.len();
            pairs.insert((i, j), next);
        }
    }
    let injective = |len: usize| -> HashMap<Vec<usize>, usize> {
        let mut all: Vec<Vec<usize>> = tuples(n, len)
            .into_iter()
            .filter(|t| {
                let mut s = t.clone();
                s.sort_unstable();
                s.dedup();
                s.len() == t.len()
            })
            .collect();
        all.sort();
        all.into_iter().enumerate().map(|(r, t)| (t, r)).collect()
    };
    let row_rank = injective(shape.u().len());
    let col_rank = injective(shape.v().len());
    let mut m = Matrix::zeros(row_rank.len(), col_rank.len());
    for phi in tuples(n, shape.k()) {
        let mut s = phi.clone();
        s.sort_unstable();
        s.dedup();
        if s.len() != phi.len() {
            continue;
        }
        let w: f64 = shape
            .edges()
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (phi[a].min(phi[b]), phi[a].max(phi[b]));
                g[pairs[&(x, y)]]
            })
            .product();
        let ut: Vec<usize> = shape.u().iter().map(|&x| phi[x]).collect();
        let vt: Vec<usize> = shape.v().iter().map(|&x| phi[x]).collect();
        m[(row_rank[&ut], col_rank[&vt])] += w;
    }
    m
}
