//! The melon tensor network: `M[i, j] = ⟨T_i, T_j⟩` for first-mode slices of a
//! Gaussian order-3 tensor.
//!
//! As a polynomial, `M` lives on the `n³` variables `T_{ikl}`, numbered
//! `v(i, k, l) = i·n² + k·n + l`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::blocks::{build_gaussian_block, DerivativeBlock};
use crate::bounds::{check_t, BoundReport, BoundTerm, Normalization, Theorem};
use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::polymatrix::PolyMatrix;
use crate::sampling::{
    estimate_with, sample_rng, MomentEstimate, Quantity, SampleConfig, PURPOSE_MELON,
};

/// Largest `n` for which the sparse derivative blocks are built.
pub const MAX_BLOCK_N: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct MelonInstance {
    pub n: usize,
    /// Entries `T_{ikl}` at position `v(i, k, l)`.
    pub tensor: Vec<f64>,
    pub m: Matrix,
}

pub fn var_index(n: usize, i: usize, k: usize, l: usize) -> usize {
    (i * n + k) * n + l
}

/// Gram matrix of the first-mode slices; symmetric by construction.
pub fn melon_matrix(n: usize, tensor: &[f64]) -> Matrix {
    let slice = n * n;
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        let ti = &tensor[i * slice..(i + 1) * slice];
        for j in i..n {
            let tj = &tensor[j * slice..(j + 1) * slice];
            let v: f64 = ti.iter().zip(tj).map(|(a, b)| a * b).sum();
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::param(format!("melon needs n >= 2, got {n}")));
    }
    Ok(())
}

pub fn build_melon(n: usize, seed: u64) -> Result<MelonInstance> {
    check_n(n)?;
    let mut rng = sample_rng(seed, 0);
    let tensor: Vec<f64> = (0..n * n * n).map(|_| rng.sample(StandardNormal)).collect();
    let m = melon_matrix(n, &tensor);
    Ok(MelonInstance { n, tensor, m })
}

/// `M` as a degree-2 polynomial in the `n³` tensor entries.
pub fn melon_polymatrix(n: usize) -> Result<PolyMatrix> {
    check_n(n)?;
    let mut terms = Vec::new();
    for i in 0..n {
        for j in i..n {
            let mut c = Matrix::unit(n, n, i, j);
            if i != j {
                c[(j, i)] = 1.0;
            }
            for k in 0..n {
                for l in 0..n {
                    terms.push((
                        vec![var_index(n, i, k, l), var_index(n, j, k, l)],
                        c.clone(),
                    ));
                }
            }
        }
    }
    PolyMatrix::from_terms(n * n * n, (n, n), false, terms)
}

/// Second-derivative block matrices `M_{2,0}`, `M_{0,2}`, `M_{1,1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MelonBlocks {
    pub m20: DerivativeBlock,
    pub m02: DerivativeBlock,
    pub m11: DerivativeBlock,
}

pub fn melon_blocks(n: usize) -> Result<MelonBlocks> {
    if n > MAX_BLOCK_N {
        return Err(Error::ResourceCap {
            what: "melon block dimension n".into(),
            required: n,
            cap: MAX_BLOCK_N,
        });
    }
    let p = melon_polymatrix(n)?;
    Ok(MelonBlocks {
        m20: build_gaussian_block(&p, 2, 0),
        m02: build_gaussian_block(&p, 0, 2),
        m11: build_gaussian_block(&p, 1, 1),
    })
}

/// `ln ‖M_{0,2}‖_{2t}^{2t} = ln(n (2n³ + 2n²)^t)`, an identity.
pub fn log_m02_closed_form(n: usize, t: u32) -> f64 {
    let n = n as f64;
    n.ln() + f64::from(t) * (2.0 * n.powi(3) + 2.0 * n * n).ln()
}

/// `ln(n² (4n + 2n²)^t)`, a Frobenius upper bound on `‖M_{1,1}‖_{2t}^{2t}`.
pub fn log_m11_frobenius_bound(n: usize, t: u32) -> f64 {
    let n = n as f64;
    2.0 * n.ln() + f64::from(t) * (4.0 * n + 2.0 * n * n).ln()
}

/// `‖M_{1,1}‖_{2t}^{2t} = n² ((n+1)^{2t} + n² − 1)`: each diagonal block is
/// the identity-vector projection scaled by `n` plus the swap operator.
pub fn m11_closed_form(n: usize, t: u32) -> f64 {
    let nf = n as f64;
    nf * nf * ((nf + 1.0).powi(2 * t as i32) + nf * nf - 1.0)
}

/// `n (2n² + n³)^t`, the trace expression written in the textbook argument.
/// It understates `‖M_{0,2}‖_{2t}^{2t}` and is kept for reference only.
pub fn proof_m02_closed_form(n: usize, t: u32) -> f64 {
    let n = n as f64;
    n * (2.0 * n * n + n.powi(3)).powi(t as i32)
}

/// `(8t)^{2t} (‖M_{2,0}‖ + ‖M_{0,2}‖ + ‖M_{1,1}‖)` bounding
/// `E‖M − EM‖_{2t}^{2t}`.
pub fn melon_bound(n: usize, t: u32) -> Result<BoundReport> {
    check_t(t)?;
    check_n(n)?;
    let tf = f64::from(t);
    let c = 2.0 * tf * (8.0 * tf).ln();
    let terms = vec![
        BoundTerm::new("(2,0)", c, log_m02_closed_form(n, t)),
        BoundTerm::new("(0,2)", c, log_m02_closed_form(n, t)),
        BoundTerm::new("(1,1)", c, log_m11_frobenius_bound(n, t)),
    ];
    Ok(BoundReport::new(
        Theorem::Melon,
        t,
        Normalization::MomentPower,
        terms,
    ))
}

/// Estimates `E‖M − n²I‖_{2t}^{2t}` with `cfg.n` and `cfg.t`; `cfg.dist` is
/// ignored since the entries are Gaussian.
pub fn estimate_melon_moment(cfg: &SampleConfig) -> Result<MomentEstimate> {
    let n = cfg.n;
    check_n(n)?;
    let q = Quantity::Power {
        exponent: 2 * cfg.t,
    };
    let shift = (n * n) as f64;
    estimate_with(cfg, PURPOSE_MELON, &q.label(), |rng| {
        let mut tensor = vec![0.0; n * n * n];
        Distribution::Gaussian.fill(rng, &mut tensor);
        let mut m = melon_matrix(n, &tensor);
        for i in 0..n {
            m[(i, i)] -= shift;
        }
        q.log_value(&m)
    })
}
