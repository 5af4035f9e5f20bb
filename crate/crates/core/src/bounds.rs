//! Moment bounds for polynomial random matrices, itemized per term.
//!
//! Every constant is carried as a natural logarithm. A [`BoundReport`] total is
//! the log-sum-exp of its term contributions, and each contribution is
//! `log_constant + ln(schatten)`.

use serde::{Deserialize, Serialize};

use crate::blocks::{block_log_schatten_power, build_block, build_gaussian_block, expected_block};
use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::linalg::{
    log_schatten_power, matrix_abs, symmetric_eigenvalues, Matrix, SINGULAR_CUTOFF,
};
use crate::numerics::{format_log_value, log_sum_exp, pairwise_sum};
use crate::polymatrix::PolyMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    Rosenthal,
    Quadratic,
    HomogeneousMultilinear,
    Multilinear,
    Gaussian,
    GraphShape,
    Melon,
}

/// Whether the total bounds `E‖·‖^p` or its `p`-th root.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    MomentPower,
    MomentRoot,
}

mod log_value {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NEG_INFINITY))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundTerm {
    pub label: String,
    pub log_constant: f64,
    pub schatten: f64,
    #[serde(with = "log_value")]
    pub log_contribution: f64,
}

impl BoundTerm {
    pub fn new(label: impl Into<String>, log_constant: f64, log_schatten: f64) -> Self {
        BoundTerm {
            label: label.into(),
            log_constant,
            schatten: log_schatten.exp(),
            log_contribution: log_constant + log_schatten,
        }
    }

    pub fn contribution(&self) -> f64 {
        self.log_contribution.exp()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem: Theorem,
    pub t: u32,
    pub normalization: Normalization,
    pub terms: Vec<BoundTerm>,
    #[serde(with = "log_value")]
    pub log_total: f64,
}

impl BoundReport {
    pub fn new(
        theorem: Theorem,
        t: u32,
        normalization: Normalization,
        terms: Vec<BoundTerm>,
    ) -> Self {
        let logs: Vec<f64> = terms.iter().map(|t| t.log_contribution).collect();
        BoundReport {
            theorem,
            t,
            normalization,
            terms,
            log_total: log_sum_exp(&logs),
        }
    }

    pub fn total(&self) -> f64 {
        self.log_total.exp()
    }

    /// Total in scientific notation, valid beyond the `f64` range.
    pub fn display_total(&self) -> String {
        format_log_value(self.log_total)
    }

    pub fn term(&self, label: &str) -> Option<&BoundTerm> {
        self.terms.iter().find(|t| t.label == label)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Input(e.to_string()))
    }
}

/// How the diagonal term of the Rosenthal bound treats `E[x^{4t}]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DiagonalMoment {
    /// The exact moment of the distribution.
    #[default]
    Exact,
    /// `L^{4t}`, as in the bounded-variable recursions.
    BoundL,
}

pub(crate) fn check_t(t: u32) -> Result<()> {
    if t < 2 {
        return Err(Error::param(format!("t must be an integer >= 2, got {t}")));
    }
    Ok(())
}

/// `(a, b, c)` with `a + b + c = d`, in lexicographic order.
pub fn triples(d: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for a in 0..=d {
        for b in 0..=d - a {
            out.push((a, b, d - a - b));
        }
    }
    out
}

fn label3((a, b, c): (usize, usize, usize)) -> String {
    format!("({a},{b},{c})")
}

fn log_psd_trace_power(gram: &Matrix, power: u32) -> f64 {
    let ev = symmetric_eigenvalues(gram);
    let max = ev.iter().fold(0.0f64, |m, &l| m.max(l));
    let cutoff = SINGULAR_CUTOFF * SINGULAR_CUTOFF * max;
    let logs: Vec<f64> = ev
        .iter()
        .filter(|&&l| l > 0.0 && l >= cutoff)
        .map(|l| f64::from(power) * l.ln())
        .collect();
    log_sum_exp(&logs)
}

pub fn rosenthal_rhs(coefficients: &[Matrix], dist: &Distribution, t: u32) -> Result<BoundReport> {
    rosenthal_rhs_with(coefficients, dist, t, DiagonalMoment::Exact)
}

/// Right-hand side of the non-Hermitian matrix Rosenthal inequality for
/// `E‖Σ_k C_k x_k‖_{4t}^{4t}`.
pub fn rosenthal_rhs_with(
    coefficients: &[Matrix],
    dist: &Distribution,
    t: u32,
    diagonal: DiagonalMoment,
) -> Result<BoundReport> {
    check_t(t)?;
    let tf = f64::from(t);
    let four_t = 4 * t;
    let log_diag_moment = match diagonal {
        DiagonalMoment::Exact => dist.log_even_moment(four_t),
        DiagonalMoment::BoundL => f64::from(four_t) * dist.require_bound()?.ln(),
    };
    let (mut rows, mut cols, mut diag) = (f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    if let Some(first) = coefficients.first() {
        if let Some(bad) = coefficients.iter().find(|c| c.shape() != first.shape()) {
            return Err(Error::DimensionMismatch {
                expected: first.shape(),
                got: bad.shape(),
            });
        }
        let (r, c) = first.shape();
        let mut sum_rows = Matrix::zeros(r, r);
        let mut sum_cols = Matrix::zeros(c, c);
        for ck in coefficients {
            sum_rows.add_scaled(&ck.transpose().gram(), 1.0)?;
            sum_cols.add_scaled(&ck.gram(), 1.0)?;
        }
        rows = log_psd_trace_power(&sum_rows, 2 * t);
        cols = log_psd_trace_power(&sum_cols, 2 * t);
        let per: Vec<f64> = coefficients
            .iter()
            .map(|ck| log_schatten_power(ck, four_t))
            .collect::<Result<_>>()?;
        diag = log_sum_exp(&per);
    }
    let log_var = 3.0 * tf * (16.0 * tf).ln();
    let terms = vec![
        BoundTerm::new("variance_rows", log_var, rows),
        BoundTerm::new("variance_cols", log_var, cols),
        BoundTerm::new(
            "diagonal",
            4.0 * tf * (8.0 * tf).ln() + log_diag_moment,
            diag,
        ),
    ];
    Ok(BoundReport::new(
        Theorem::Rosenthal,
        t,
        Normalization::MomentPower,
        terms,
    ))
}

/// Bound on `E‖F − EF‖_{4t}` for a homogeneous degree-2 multilinear `F`.
pub fn quadratic_bound(f: &PolyMatrix, dist: &Distribution, t: u32) -> Result<BoundReport> {
    check_t(t)?;
    f.require_multilinear()?;
    let l = dist.require_bound()?;
    let d = f.homogeneous_degree()?;
    if !f.is_zero() && d != 2 {
        return Err(Error::param(format!(
            "quadratic bound needs degree 2, got {d}"
        )));
    }
    let tf = f64::from(t);
    let base = (2.0 * (32.0 * tf).powi(2)).ln();
    let mut terms = Vec::new();
    for abc in triples(2) {
        let log_power = block_log_schatten_power(&build_block(f, abc.0, abc.1, abc.2)?, 4 * t)?;
        let log_norm = log_power / f64::from(4 * t);
        terms.push(BoundTerm::new(
            label3(abc),
            base + abc.2 as f64 * l.ln(),
            log_norm,
        ));
    }
    Ok(BoundReport::new(
        Theorem::Quadratic,
        t,
        Normalization::MomentRoot,
        terms,
    ))
}

fn homogeneous_terms(
    f: &PolyMatrix,
    d: usize,
    l: f64,
    t: u32,
    extra_log: f64,
    prefix: &str,
) -> Result<Vec<BoundTerm>> {
    let tf = f64::from(t);
    let df = d as f64;
    let base = 4.0 * df * tf * (48.0 * df * tf).ln() + extra_log;
    triples(d)
        .into_iter()
        .map(|abc| {
            let log_power = block_log_schatten_power(&build_block(f, abc.0, abc.1, abc.2)?, 4 * t)?;
            let log_constant = base + 4.0 * abc.2 as f64 * tf * l.ln();
            Ok(BoundTerm::new(
                format!("{prefix}{}", label3(abc)),
                log_constant,
                log_power,
            ))
        })
        .collect()
}

/// Bound on `E‖F − EF‖_{4t}^{4t}` for a homogeneous multilinear `F`.
pub fn homogeneous_multilinear_bound(
    f: &PolyMatrix,
    dist: &Distribution,
    t: u32,
) -> Result<BoundReport> {
    check_t(t)?;
    f.require_multilinear()?;
    let l = dist.require_bound()?;
    let d = f.homogeneous_degree()?;
    let terms = if d == 0 {
        Vec::new()
    } else {
        homogeneous_terms(f, d, l, t, 0.0, "")?
    };
    Ok(BoundReport::new(
        Theorem::HomogeneousMultilinear,
        t,
        Normalization::MomentPower,
        terms,
    ))
}

/// Bound on `E‖F − EF‖_{4t}^{4t}` for a multilinear `F` of any degree mix.
/// Term labels carry the degree of the homogeneous part, e.g. `d2:(1,1,0)`.
pub fn multilinear_bound(f: &PolyMatrix, dist: &Distribution, t: u32) -> Result<BoundReport> {
    check_t(t)?;
    f.require_multilinear()?;
    let l = dist.require_bound()?;
    let big_d = f.degree();
    let mut terms = Vec::new();
    for d in f.degrees().into_iter().filter(|&d| d >= 1) {
        let part = f.homogeneous_part(d);
        let extra = 4.0 * f64::from(t) * (big_d as f64).ln();
        terms.extend(homogeneous_terms(&part, d, l, t, extra, &format!("d{d}:"))?);
    }
    Ok(BoundReport::new(
        Theorem::Multilinear,
        t,
        Normalization::MomentPower,
        terms,
    ))
}

/// Bound on `E‖P − EP‖_{2t}^{2t}` for a homogeneous polynomial of Gaussian
/// variables.
pub fn gaussian_bound(p: &PolyMatrix, t: u32) -> Result<BoundReport> {
    check_t(t)?;
    let d = p.homogeneous_degree()?;
    let tf = f64::from(t);
    let log_constant = 2.0 * tf * ((d as f64 + 0.5) * std::f64::consts::LN_2 + tf.ln());
    let mut terms = Vec::new();
    for a in 0..=d {
        for b in 0..=d - a {
            if a + b == 0 {
                continue;
            }
            let eb = expected_block(&build_gaussian_block(p, a, b), &Distribution::Gaussian);
            let log_power = block_log_schatten_power(&eb, 2 * t)?;
            terms.push(BoundTerm::new(
                format!("({a},{b})"),
                log_constant,
                log_power,
            ));
        }
    }
    Ok(BoundReport::new(
        Theorem::Gaussian,
        t,
        Normalization::MomentPower,
        terms,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

fn trace_abs_power(a: &Matrix, r: f64) -> f64 {
    let ev: Vec<f64> = symmetric_eigenvalues(&matrix_abs(a))
        .into_iter()
        .map(|l| l.max(0.0).powf(r))
        .collect();
    pairwise_sum(&ev)
}

/// Compares `tr|Σ A_i|^r` with `m^{r-1} tr(Σ |A_i|^r)`.
pub fn trace_inequality_check(matrices: &[Matrix], r: f64) -> Result<TraceCheck> {
    if !(r >= 1.0) {
        return Err(Error::param(format!("r must be >= 1, got {r}")));
    }
    let first = matrices
        .first()
        .ok_or_else(|| Error::Input("need at least one matrix".into()))?;
    let (size, _) = first.shape();
    for m in matrices {
        if m.rows() != m.cols() || m.rows() != size {
            return Err(Error::DimensionMismatch {
                expected: (size, size),
                got: m.shape(),
            });
        }
    }
    let mut sum = Matrix::zeros(size, size);
    for m in matrices {
        sum.add_scaled(m, 1.0)?;
    }
    let lhs = trace_abs_power(&sum, r);
    let parts: Vec<f64> = matrices.iter().map(|m| trace_abs_power(m, r)).collect();
    let rhs = (matrices.len() as f64).powf(r - 1.0) * pairwise_sum(&parts);
    Ok(TraceCheck {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + 1e-9),
    })
}

/// Markov tail `min(1, moment_bound / threshold^power)`.
pub fn tail_from_moment(moment_bound: f64, power: u32, threshold: f64) -> Result<f64> {
    if moment_bound < 0.0 {
        return Err(Error::param("moment bound must be nonnegative"));
    }
    tail_from_log_moment(moment_bound.ln(), power, threshold)
}

/// [`tail_from_moment`] with the moment bound given as a logarithm.
pub fn tail_from_log_moment(log_moment_bound: f64, power: u32, threshold: f64) -> Result<f64> {
    if !(threshold > 0.0) {
        return Err(Error::param(format!(
            "threshold must be positive, got {threshold}"
        )));
    }
    let log_tail = log_moment_bound - f64::from(power) * threshold.ln();
    Ok(log_tail.min(0.0).exp())
}
