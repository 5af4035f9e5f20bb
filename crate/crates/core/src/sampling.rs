//! Seeded Monte Carlo estimation.
//!
//! Sample `i` of an experiment draws from a ChaCha8 generator keyed by
//! `(seed, purpose)` on stream `i`, so estimates depend only on the
//! configuration and never on how samples are spread across threads. Per-sample
//! values are kept as logarithms and summed with a fixed pairwise tree.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{rosenthal_rhs, BoundReport, Normalization};
use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::linalg::{log_schatten_power, spectral_norm, Matrix};
use crate::numerics::{log_add_exp, pairwise_sum};
use crate::polymatrix::PolyMatrix;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "POLYMAT_THREADS";

// Purposes keep independent experiments on disjoint generator keys.
pub(crate) const PURPOSE_MOMENT: u64 = 1;
pub(crate) const PURPOSE_COUPLED: u64 = 2;
pub(crate) const PURPOSE_DECOUPLED: u64 = 3;
pub(crate) const PURPOSE_ROSENTHAL: u64 = 4;
pub(crate) const PURPOSE_GRAPH: u64 = 5;
pub(crate) const PURPOSE_MELON: u64 = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub dist: Distribution,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub t: u32,
    /// Worker cap; falls back to `POLYMAT_THREADS`, then to rayon's default.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl SampleConfig {
    pub fn new(dist: Distribution, n: usize, samples: usize, seed: u64, t: u32) -> Self {
        SampleConfig {
            dist,
            n,
            samples,
            seed,
            t,
            threads: None,
        }
    }

    pub fn with_threads(mut self, threads: Option<usize>) -> Self {
        self.threads = threads;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::param("sample count must be at least 1"));
        }
        if self.t == 0 {
            return Err(Error::param("t must be at least 1"));
        }
        Ok(())
    }
}

/// What is averaged over samples of a random matrix `X`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Quantity {
    /// `‖X‖_p^p`.
    Power { exponent: u32 },
    /// `‖X‖_p`.
    Norm { exponent: u32 },
    /// `σ_max(X)`.
    Spectral,
}

impl Quantity {
    pub fn label(&self) -> String {
        match self {
            Quantity::Power { exponent } => format!("E|X|_{exponent}^{exponent}"),
            Quantity::Norm { exponent } => format!("E|X|_{exponent}"),
            Quantity::Spectral => "E|X|_op".to_string(),
        }
    }

    /// Logarithm of the quantity at one realization.
    pub fn log_value(&self, x: &Matrix) -> Result<f64> {
        match *self {
            Quantity::Power { exponent } => log_schatten_power(x, exponent),
            Quantity::Norm { exponent } => {
                Ok(log_schatten_power(x, exponent)? / f64::from(exponent))
            }
            Quantity::Spectral => Ok(spectral_norm(x).ln()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
    pub quantity: String,
    /// `ln mean`, finite even when `mean` overflows.
    pub log_mean: f64,
    pub log_stderr: f64,
}

impl MomentEstimate {
    /// `ln(mean + k · stderr)`.
    pub fn log_upper(&self, k: f64) -> f64 {
        if k <= 0.0 {
            return self.log_mean;
        }
        log_add_exp(self.log_mean, k.ln() + self.log_stderr)
    }

    /// Summarizes per-sample log values.
    pub fn from_log_values(logs: &[f64], quantity: impl Into<String>) -> Self {
        let samples = logs.len();
        let scale = logs
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(f64::NEG_INFINITY, f64::max);
        let quantity = quantity.into();
        if scale == f64::NEG_INFINITY || samples == 0 {
            return MomentEstimate {
                mean: 0.0,
                stderr: 0.0,
                samples,
                quantity,
                log_mean: f64::NEG_INFINITY,
                log_stderr: f64::NEG_INFINITY,
            };
        }
        let n = samples as f64;
        let scaled: Vec<f64> = logs.iter().map(|l| (l - scale).exp()).collect();
        let mean = pairwise_sum(&scaled) / n;
        let var = if samples > 1 {
            let dev: Vec<f64> = scaled.iter().map(|v| (v - mean) * (v - mean)).collect();
            pairwise_sum(&dev) / (n - 1.0)
        } else {
            0.0
        };
        let se = (var / n).sqrt();
        let log_mean = scale + mean.ln();
        let log_stderr = scale + se.ln();
        MomentEstimate {
            mean: log_mean.exp(),
            stderr: log_stderr.exp(),
            samples,
            quantity,
            log_mean,
            log_stderr,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for `stream` under `seed`.
pub fn sample_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) fn experiment_rng(seed: u64, purpose: u64, index: u64) -> ChaCha8Rng {
    sample_rng(splitmix64(seed ^ splitmix64(purpose)), index)
}

/// `n` independent draws from `dist` on the given stream.
pub fn sample_vector(dist: &Distribution, n: usize, seed: u64, stream: u64) -> Vec<f64> {
    let mut rng = sample_rng(seed, stream);
    let mut x = vec![0.0; n];
    dist.fill(&mut rng, &mut x);
    x
}

fn resolve_threads(threads: Option<usize>) -> Option<usize> {
    threads
        .or_else(|| std::env::var(THREADS_ENV).ok()?.trim().parse().ok())
        .filter(|&k| k > 0)
}

/// Runs `f` inside a pool capped at `threads` workers (or `POLYMAT_THREADS`).
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match resolve_threads(threads) {
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        None => f(),
    }
}

/// Per-sample values of `f`, in sample order.
pub fn sample_values<F>(cfg: &SampleConfig, purpose: u64, f: F) -> Result<Vec<f64>>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    cfg.validate()?;
    with_threads(cfg.threads, || {
        (0..cfg.samples as u64)
            .into_par_iter()
            .map(|i| f(&mut experiment_rng(cfg.seed, purpose, i)))
            .collect()
    })
}

/// Mean and standard error of `e^{f}` where `f` returns a log value.
pub fn estimate_with<F>(
    cfg: &SampleConfig,
    purpose: u64,
    label: &str,
    f: F,
) -> Result<MomentEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    let logs = sample_values(cfg, purpose, f)?;
    Ok(MomentEstimate::from_log_values(&logs, label))
}

fn check_n(f: &PolyMatrix, cfg: &SampleConfig) -> Result<()> {
    if f.n() != cfg.n {
        return Err(Error::Input(format!(
            "config has n = {}, polynomial has n = {}",
            cfg.n,
            f.n()
        )));
    }
    Ok(())
}

/// Estimates `E q(F(x) − EF)`.
pub fn estimate_moment(
    f: &PolyMatrix,
    cfg: &SampleConfig,
    quantity: Quantity,
) -> Result<MomentEstimate> {
    check_n(f, cfg)?;
    let mean = f.expectation(&cfg.dist);
    estimate_with(cfg, PURPOSE_MOMENT, &quantity.label(), |rng| {
        let mut x = vec![0.0; f.n()];
        cfg.dist.fill(rng, &mut x);
        let mut v = f.evaluate(&x)?;
        v.add_scaled(&mean, -1.0)?;
        quantity.log_value(&v)
    })
}

/// Whether `mean + k·stderr` of a `power`-th moment estimate stays below the
/// report. Root-normalized reports are compared against the `power`-th root.
pub fn dominated_by(est: &MomentEstimate, power: u32, report: &BoundReport, k: f64) -> bool {
    let upper = est.log_upper(k);
    match report.normalization {
        Normalization::MomentPower => upper <= report.log_total,
        Normalization::MomentRoot => upper / f64::from(power) <= report.log_total,
    }
}

/// First-moment or power-form comparison of a polynomial against its
/// decoupled version.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecouplingMode {
    /// `E‖F(x)‖_{2t} ≤ C · E‖F(x^{(1)},…)‖_{2t}` with `C = d^d` (or `k^k`).
    Norm,
    /// `E‖F(x)‖_{2t}^{2t} ≤ C^{2t} · E‖F(x^{(1)},…)‖_{2t}^{2t}`.
    Power,
}

impl DecouplingMode {
    pub(crate) fn quantity(self, t: u32) -> Quantity {
        match self {
            DecouplingMode::Norm => Quantity::Norm { exponent: 2 * t },
            DecouplingMode::Power => Quantity::Power { exponent: 2 * t },
        }
    }

    pub(crate) fn log_constant(self, base: usize, t: u32) -> f64 {
        let c = base as f64 * (base as f64).ln();
        match self {
            DecouplingMode::Norm => c,
            DecouplingMode::Power => f64::from(2 * t) * c,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecouplingResult {
    pub mode: DecouplingMode,
    pub lhs: MomentEstimate,
    pub rhs: MomentEstimate,
    pub log_constant: f64,
    /// `lhs ≤ C·rhs + 4·sqrt(se_lhs² + C²·se_rhs²)`.
    pub holds: bool,
}

impl DecouplingResult {
    pub(crate) fn new(
        mode: DecouplingMode,
        lhs: MomentEstimate,
        rhs: MomentEstimate,
        log_constant: f64,
    ) -> Self {
        // Compare on a common scale so that large powers do not overflow.
        let scale = lhs.log_mean.max(log_constant + rhs.log_mean);
        let s = |log: f64| (log - scale).exp();
        let margin = (s(lhs.log_stderr).powi(2) + s(log_constant + rhs.log_stderr).powi(2)).sqrt();
        let holds = scale == f64::NEG_INFINITY
            || s(lhs.log_mean) <= s(log_constant + rhs.log_mean) + 4.0 * margin;
        DecouplingResult {
            mode,
            lhs,
            rhs,
            log_constant,
            holds,
        }
    }
}

/// Compares `F(x)` against `F(x^{(1)}, …, x^{(d)})` for a homogeneous
/// multilinear `F` of degree `d`, with constant `d^d`.
pub fn decoupling_ratio(
    f: &PolyMatrix,
    cfg: &SampleConfig,
    mode: DecouplingMode,
) -> Result<DecouplingResult> {
    check_n(f, cfg)?;
    f.require_multilinear()?;
    let d = f.homogeneous_degree()?;
    if d == 0 {
        return Err(Error::param("decoupling needs degree at least 1"));
    }
    let q = mode.quantity(cfg.t);
    let n = f.n();
    let lhs = estimate_with(cfg, PURPOSE_COUPLED, &q.label(), |rng| {
        let mut x = vec![0.0; n];
        cfg.dist.fill(rng, &mut x);
        q.log_value(&f.evaluate(&x)?)
    })?;
    let rhs = estimate_with(
        cfg,
        PURPOSE_DECOUPLED,
        &format!("{} (decoupled)", q.label()),
        |rng| {
            let copies: Vec<Vec<f64>> = (0..d)
                .map(|_| {
                    let mut x = vec![0.0; n];
                    cfg.dist.fill(rng, &mut x);
                    x
                })
                .collect();
            q.log_value(&f.evaluate_decoupled(&copies)?)
        },
    )?;
    Ok(DecouplingResult::new(
        mode,
        lhs,
        rhs,
        mode.log_constant(d, cfg.t),
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RosenthalCheck {
    pub lhs: MomentEstimate,
    pub rhs: BoundReport,
    /// `mean + 4·stderr ≤ rhs`.
    pub holds: bool,
}

/// Estimates `E‖Σ_k C_k x_k‖_{4t}^{4t}` and compares it with the Rosenthal
/// right-hand side.
pub fn rosenthal_empirical(
    coefficients: &[Matrix],
    dist: &Distribution,
    t: u32,
    cfg: &SampleConfig,
) -> Result<RosenthalCheck> {
    let rhs = rosenthal_rhs(coefficients, dist, t)?;
    let q = Quantity::Power { exponent: 4 * t };
    let lhs = match coefficients.first() {
        None => MomentEstimate::from_log_values(&vec![f64::NEG_INFINITY; cfg.samples], q.label()),
        Some(first) => estimate_with(cfg, PURPOSE_ROSENTHAL, &q.label(), |rng| {
            let mut sum = Matrix::zeros(first.rows(), first.cols());
            for c in coefficients {
                sum.add_scaled(c, dist.sample(rng))?;
            }
            q.log_value(&sum)
        })?,
    };
    let holds = lhs.log_mean == f64::NEG_INFINITY || dominated_by(&lhs, 4 * t, &rhs, 4.0);
    Ok(RosenthalCheck { lhs, rhs, holds })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vectors_are_reproducible() {
        let d = Distribution::pbiased(0.3).unwrap();
        assert_eq!(sample_vector(&d, 50, 9, 2), sample_vector(&d, 50, 9, 2));
        assert_ne!(sample_vector(&d, 50, 9, 2), sample_vector(&d, 50, 9, 3));
        let half = Distribution::pbiased(0.5).unwrap();
        assert!(sample_vector(&half, 100, 1, 0)
            .iter()
            .all(|v| v.abs() == 1.0));
    }

    #[test]
    fn constant_polynomial_has_zero_moment() {
        let c = Matrix::identity(2);
        let f = PolyMatrix::from_terms(2, (2, 2), false, [(vec![], c)]).unwrap();
        let cfg = SampleConfig::new(Distribution::Rademacher, 2, 50, 1, 2);
        let est = estimate_moment(&f, &cfg, Quantity::Power { exponent: 4 }).unwrap();
        assert_eq!((est.mean, est.stderr), (0.0, 0.0));
    }

    #[test]
    fn summary_statistics() {
        let logs: Vec<f64> = [1.0f64, 2.0, 3.0, 4.0].iter().map(|v| v.ln()).collect();
        let e = MomentEstimate::from_log_values(&logs, "x");
        assert!((e.mean - 2.5).abs() < 1e-12);
        let var = (2.25 + 0.25 + 0.25 + 2.25) / 3.0;
        assert!((e.stderr - (var / 4.0f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn thread_count_does_not_change_estimates() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        let f = PolyMatrix::from_terms(
            3,
            (2, 2),
            true,
            [(vec![0, 1], a.clone()), (vec![1, 2], a.transpose())],
        )
        .unwrap();
        let base = SampleConfig::new(Distribution::Gaussian, 3, 500, 42, 2);
        let q = Quantity::Power { exponent: 4 };
        let one = estimate_moment(&f, &base.clone().with_threads(Some(1)), q).unwrap();
        let four = estimate_moment(&f, &base.with_threads(Some(4)), q).unwrap();
        assert_eq!(one, four);
    }
}
