//! Partial-derivative block matrices `F_{a,b,c}` and `P_{a,b}`.
//!
//! Each differentiation step sends its variable index to the row key
//! ([`Step::Row`]), the column key ([`Step::Col`]) or both ([`Step::Diag`]).
//! Keys are ordered tuples of 0-based indices; in the dense layout the index
//! placed by the last step is the outermost block coordinate.
//!
//! For multilinear `F` the block reached after differentiating along
//! `i_1..i_k` is `((d-k)!/d!) ∂_{i_1}⋯∂_{i_k} F^{=d}`, summed over the
//! homogeneous parts `d ≥ k`. At full depth this is the ordered-tuple
//! coefficient `C_S / d!`.

use std::collections::BTreeMap;

use itertools::Itertools;
use rayon::prelude::*;

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigenvalues, Matrix, SINGULAR_CUTOFF};
use crate::numerics::{factorial, log_sum_exp, pairwise_sum};
use crate::polymatrix::{Key, PolyMatrix};

/// Default cap on the side length of any Gram matrix formed by
/// [`block_schatten_power`] and on dense materialization.
pub const DEFAULT_GRAM_CAP: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    Row,
    Col,
    Diag,
}

/// All `a` row steps, then `b` column steps, then `c` diagonal steps.
pub fn canonical_order(a: usize, b: usize, c: usize) -> Vec<Step> {
    let mut order = vec![Step::Row; a];
    order.extend(std::iter::repeat_n(Step::Col, b));
    order.extend(std::iter::repeat_n(Step::Diag, c));
    order
}

#[derive(Clone, Debug, PartialEq)]
pub enum Block {
    Value(Matrix),
    Poly(PolyMatrix),
}

impl Block {
    pub fn as_value(&self) -> Option<&Matrix> {
        match self {
            Block::Value(m) => Some(m),
            Block::Poly(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeBlock {
    base_dims: (usize, usize),
    n: usize,
    a: usize,
    b: usize,
    c: usize,
    blocks: BTreeMap<(Key, Key), Block>,
}

impl DerivativeBlock {
    pub fn base_dims(&self) -> (usize, usize) {
        self.base_dims
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn abc(&self) -> (usize, usize, usize) {
        (self.a, self.b, self.c)
    }

    /// `(d1·n^{a+c}, d2·n^{b+c})`.
    pub fn logical_dims(&self) -> (u128, u128) {
        let n = self.n as u128;
        (
            self.base_dims.0 as u128 * n.pow((self.a + self.c) as u32),
            self.base_dims.1 as u128 * n.pow((self.b + self.c) as u32),
        )
    }

    pub fn blocks(&self) -> &BTreeMap<(Key, Key), Block> {
        &self.blocks
    }

    pub fn get(&self, row: &[usize], col: &[usize]) -> Option<&Block> {
        self.blocks.get(&(row.to_vec(), col.to_vec()))
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn is_deterministic(&self) -> bool {
        self.blocks.values().all(|b| matches!(b, Block::Value(_)))
    }

    fn from_polys(
        base_dims: (usize, usize),
        n: usize,
        abc: (usize, usize, usize),
        polys: BTreeMap<(Key, Key), PolyMatrix>,
    ) -> Self {
        let all_constant = polys.values().all(|p| p.degree() == 0);
        let blocks = polys
            .into_iter()
            .filter(|(_, p)| !p.is_zero())
            .map(|(k, p)| {
                let block = if all_constant {
                    Block::Value(p.constant_term())
                } else {
                    Block::Poly(p)
                };
                (k, block)
            })
            .collect();
        DerivativeBlock {
            base_dims,
            n,
            a: abc.0,
            b: abc.1,
            c: abc.2,
            blocks,
        }
    }

    fn value_blocks(&self) -> Result<Vec<(&Key, &Key, &Matrix)>> {
        self.blocks
            .iter()
            .map(|((r, c), b)| match b {
                Block::Value(m) => Ok((r, c, m)),
                Block::Poly(_) => Err(Error::Input(
                    "block matrix still has polynomial blocks; take expected_block first".into(),
                )),
            })
            .collect()
    }

    /// Dense form in the layout described in the module docs.
    pub fn to_dense(&self, cap: usize) -> Result<Matrix> {
        let (rows, cols) = self.logical_dims();
        let biggest = rows.max(cols);
        if biggest > cap as u128 {
            return Err(Error::ResourceCap {
                what: "dense block matrix side".into(),
                required: usize::try_from(biggest).unwrap_or(usize::MAX),
                cap,
            });
        }
        let (d1, d2) = self.base_dims;
        let mut out = Matrix::zeros(rows as usize, cols as usize);
        for (rk, ck, m) in self.value_blocks()? {
            let r0 = key_offset(rk, self.n) * d1;
            let c0 = key_offset(ck, self.n) * d2;
            for i in 0..d1 {
                for j in 0..d2 {
                    out[(r0 + i, c0 + j)] = m[(i, j)];
                }
            }
        }
        Ok(out)
    }
}

/// Little-endian mixed-radix position: the last key entry is most significant.
fn key_offset(key: &[usize], n: usize) -> usize {
    key.iter().rev().fold(0, |acc, &i| acc * n + i)
}

fn split_key(order: &[Step], sel: &[usize]) -> (Key, Key) {
    let mut row = Vec::new();
    let mut col = Vec::new();
    for (&step, &i) in order.iter().zip(sel) {
        match step {
            Step::Row => row.push(i),
            Step::Col => col.push(i),
            Step::Diag => {
                row.push(i);
                col.push(i);
            }
        }
    }
    // Canonical placement keeps the diagonal indices at the tail of each key.
    (row, col)
}

fn count_steps(order: &[Step]) -> (usize, usize, usize) {
    order.iter().fold((0, 0, 0), |(a, b, c), s| match s {
        Step::Row => (a + 1, b, c),
        Step::Col => (a, b + 1, c),
        Step::Diag => (a, b, c + 1),
    })
}

/// `F_{a,b,c}` in canonical order.
pub fn build_block(f: &PolyMatrix, a: usize, b: usize, c: usize) -> Result<DerivativeBlock> {
    build_block_with_order(f, &canonical_order(a, b, c))
}

/// `F_{a,b,c}` with the increments applied in `order`.
pub fn build_block_with_order(f: &PolyMatrix, order: &[Step]) -> Result<DerivativeBlock> {
    f.require_multilinear()?;
    let k = order.len();
    let mut polys: BTreeMap<(Key, Key), PolyMatrix> = BTreeMap::new();
    for (key, coeff) in f.terms() {
        let d = key.len();
        if d < k {
            continue;
        }
        let scale = factorial(d - k) / factorial(d);
        for sel in key.iter().copied().permutations(k) {
            let rest: Key = key.iter().copied().filter(|i| !sel.contains(i)).collect();
            polys
                .entry(split_key(order, &sel))
                .or_insert_with(|| PolyMatrix::zero(f.n(), f.dims(), true))
                .add_term(rest, coeff, scale);
        }
    }
    Ok(DerivativeBlock::from_polys(
        f.dims(),
        f.n(),
        count_steps(order),
        polys,
    ))
}

/// `P_{a,b}`: literal iterated derivatives, repeated indices allowed. The
/// first `a` indices of each tuple form the row key, the last `b` the column
/// key.
pub fn build_gaussian_block(p: &PolyMatrix, a: usize, b: usize) -> DerivativeBlock {
    let k = a + b;
    let mut polys: BTreeMap<(Key, Key), PolyMatrix> = BTreeMap::new();
    for (key, coeff) in p.terms() {
        if key.len() < k {
            continue;
        }
        let mut counts: Vec<(usize, usize)> = key
            .iter()
            .dedup_with_count()
            .map(|(m, &i)| (i, m))
            .collect();
        let mut tuple = Vec::with_capacity(k);
        differentiate(
            &mut counts,
            &mut tuple,
            1.0,
            k,
            &mut |tuple, counts, factor| {
                let rest: Key = counts
                    .iter()
                    .flat_map(|&(i, m)| std::iter::repeat_n(i, m))
                    .collect();
                let row = tuple[..a].to_vec();
                let col = tuple[a..].to_vec();
                polys
                    .entry((row, col))
                    .or_insert_with(|| PolyMatrix::zero(p.n(), p.dims(), false))
                    .add_term(rest, coeff, factor);
            },
        );
    }
    DerivativeBlock::from_polys(p.dims(), p.n(), (a, b, 0), polys)
}

fn differentiate(
    counts: &mut Vec<(usize, usize)>,
    tuple: &mut Vec<usize>,
    factor: f64,
    depth: usize,
    emit: &mut impl FnMut(&[usize], &[(usize, usize)], f64),
) {
    if tuple.len() == depth {
        emit(tuple, counts, factor);
        return;
    }
    for pos in 0..counts.len() {
        let (i, m) = counts[pos];
        if m == 0 {
            continue;
        }
        counts[pos].1 -= 1;
        tuple.push(i);
        differentiate(counts, tuple, factor * m as f64, depth, emit);
        tuple.pop();
        counts[pos].1 += 1;
    }
}

/// Replaces every polynomial block by its expectation under `dist`.
pub fn expected_block(block: &DerivativeBlock, dist: &Distribution) -> DerivativeBlock {
    let blocks = block
        .blocks
        .iter()
        .filter_map(|(k, b)| {
            let m = match b {
                Block::Value(m) => m.clone(),
                Block::Poly(p) => p.expectation(dist),
            };
            (!m.is_zero()).then(|| (k.clone(), Block::Value(m)))
        })
        .collect();
    DerivativeBlock {
        blocks,
        ..block.clone()
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

type Entry<'a> = (usize, usize, &'a Matrix);

/// Squared singular values of a deterministic block matrix. The bipartite
/// row/column key graph is split into connected components; each component
/// contributes the eigenvalues of its Gram matrix on the smaller side.
pub fn block_gram_spectrum(block: &DerivativeBlock, cap: usize) -> Result<Vec<f64>> {
    let entries = block.value_blocks()?;
    let mut row_ids: BTreeMap<&Key, usize> = BTreeMap::new();
    let mut col_ids: BTreeMap<&Key, usize> = BTreeMap::new();
    for (r, c, _) in &entries {
        let next = row_ids.len();
        row_ids.entry(r).or_insert(next);
        let next = col_ids.len();
        col_ids.entry(c).or_insert(next);
    }
    let nr = row_ids.len();
    let mut uf = UnionFind((0..nr + col_ids.len()).collect());
    let indexed: Vec<Entry> = entries
        .iter()
        .map(|(r, c, m)| (row_ids[r], col_ids[c], *m))
        .collect();
    for &(r, c, _) in &indexed {
        uf.union(r, nr + c);
    }
    let mut components: BTreeMap<usize, Vec<Entry>> = BTreeMap::new();
    for &e in &indexed {
        components.entry(uf.find(e.0)).or_default().push(e);
    }
    let (d1, d2) = block.base_dims;
    let components: Vec<Vec<Entry>> = components.into_values().collect();
    let spectra: Vec<Result<Vec<f64>>> = components
        .par_iter()
        .map(|comp| component_spectrum(comp, d1, d2, cap))
        .collect();
    let mut out = Vec::new();
    for s in spectra {
        out.extend(s?);
    }
    Ok(out)
}

fn component_spectrum(comp: &[Entry], d1: usize, d2: usize, cap: usize) -> Result<Vec<f64>> {
    let mut rows: Vec<usize> = comp.iter().map(|e| e.0).collect();
    let mut cols: Vec<usize> = comp.iter().map(|e| e.1).collect();
    rows.sort_unstable();
    rows.dedup();
    cols.sort_unstable();
    cols.dedup();
    let (row_dim, col_dim) = (rows.len() * d1, cols.len() * d2);
    let use_cols = col_dim <= row_dim;
    let dim = row_dim.min(col_dim);
    if dim > cap {
        return Err(Error::ResourceCap {
            what: "Gram matrix of a block component".into(),
            required: dim,
            cap,
        });
    }
    // Gram on the column side is Σ_r B_{r,p}ᵀ B_{r,q}; on the row side the
    // roles swap and each block enters transposed.
    let (local, size, groups) = if use_cols {
        let local: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(k, &c)| (c, k)).collect();
        let mut groups: BTreeMap<usize, Vec<(usize, Matrix)>> = BTreeMap::new();
        for &(r, c, m) in comp {
            groups.entry(r).or_default().push((local[&c], m.clone()));
        }
        (local, d2, groups)
    } else {
        let local: BTreeMap<usize, usize> = rows.iter().enumerate().map(|(k, &r)| (r, k)).collect();
        let mut groups: BTreeMap<usize, Vec<(usize, Matrix)>> = BTreeMap::new();
        for &(r, c, m) in comp {
            groups
                .entry(c)
                .or_default()
                .push((local[&r], m.transpose()));
        }
        (local, d1, groups)
    };
    let mut gram = Matrix::zeros(local.len() * size, local.len() * size);
    for group in groups.values() {
        for (x, (p, bp)) in group.iter().enumerate() {
            let bpt = bp.transpose();
            for (q, bq) in &group[x..] {
                let prod = bpt.matmul(bq)?;
                for i in 0..size {
                    for j in 0..size {
                        let v = prod[(i, j)];
                        gram[(p * size + i, q * size + j)] += v;
                        if p != q {
                            gram[(q * size + j, p * size + i)] += v;
                        }
                    }
                }
            }
        }
    }
    Ok(symmetric_eigenvalues(&gram)
        .into_iter()
        .map(|l| l.max(0.0))
        .collect())
}

fn significant_eigs(eigs: Vec<f64>) -> Vec<f64> {
    let max = eigs.iter().fold(0.0f64, |m, &l| m.max(l));
    let cutoff = SINGULAR_CUTOFF * SINGULAR_CUTOFF * max;
    eigs.into_iter()
        .filter(|&l| l > 0.0 && l >= cutoff)
        .collect()
}

fn check_two_t(two_t: u32) -> Result<u32> {
    if two_t < 2 || !two_t.is_multiple_of(2) {
        return Err(Error::param(format!(
            "Schatten exponent must be an even integer >= 2, got {two_t}"
        )));
    }
    Ok(two_t / 2)
}

/// `‖B‖_{2t}^{2t}` from the sparse structure.
pub fn block_schatten_power(block: &DerivativeBlock, two_t: u32) -> Result<f64> {
    block_schatten_power_capped(block, two_t, DEFAULT_GRAM_CAP)
}

pub fn block_schatten_power_capped(block: &DerivativeBlock, two_t: u32, cap: usize) -> Result<f64> {
    let t = check_two_t(two_t)?;
    let eigs = significant_eigs(block_gram_spectrum(block, cap)?);
    let powers: Vec<f64> = eigs.iter().map(|l| l.powi(t as i32)).collect();
    Ok(pairwise_sum(&powers))
}

/// `ln ‖B‖_{2t}^{2t}`; `-inf` for the zero block matrix.
pub fn block_log_schatten_power(block: &DerivativeBlock, two_t: u32) -> Result<f64> {
    block_log_schatten_power_capped(block, two_t, DEFAULT_GRAM_CAP)
}

pub fn block_log_schatten_power_capped(
    block: &DerivativeBlock,
    two_t: u32,
    cap: usize,
) -> Result<f64> {
    let t = check_two_t(two_t)?;
    let eigs = significant_eigs(block_gram_spectrum(block, cap)?);
    let logs: Vec<f64> = eigs.iter().map(|l| f64::from(t) * l.ln()).collect();
    Ok(log_sum_exp(&logs))
}
