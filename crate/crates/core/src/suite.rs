//! The seeded acceptance corpus.
//!
//! [`run_suite`] evaluates criteria 1–11 and returns a deterministic
//! [`SuiteReport`] together with wall-clock timings, which are kept out of the
//! report. Criterion 12 ([`determinism_check`]) runs the suite twice under
//! different worker counts and compares the serialized reports byte for byte.

use std::time::Instant;

use itertools::Itertools;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::blocks::{block_schatten_power, build_block_with_order, canonical_order};
use crate::bounds::{
    gaussian_bound, homogeneous_multilinear_bound, multilinear_bound, quadratic_bound,
    trace_inequality_check, BoundReport,
};
use crate::corpus::{
    edge_shape, path_shape, quadratic_chaos, random_gaussian_poly, random_matrix,
    random_multilinear, random_shape, triangle_shape,
};
use crate::dist::Distribution;
use crate::error::Result;
use crate::graph::{
    decoupling_ratio_graph, estimate_graph_moment, min_vertex_separator,
    sample_graph_spectral_norms, shape_bound, Shape,
};
use crate::linalg::{hermitian_dilation, schatten_power, trace_power_schatten};
use crate::melon::{estimate_melon_moment, melon_bound};
use crate::numerics::ols_slope;
use crate::polymatrix::PolyMatrix;
use crate::sampling::{
    decoupling_ratio, dominated_by, estimate_moment, rosenthal_empirical, sample_rng, with_threads,
    DecouplingMode, MomentEstimate, Quantity, SampleConfig,
};

/// Wall-clock limits in seconds for the timed criteria.
pub const RUNTIME_LIMITS: [(u32, f64); 3] = [(1, 30.0), (4, 120.0), (11, 300.0)];

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteOptions {
    pub seed: u64,
    pub threads: Option<usize>,
    /// Cut Monte Carlo sample counts twentyfold for quick wiring checks.
    pub smoke: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: DEFAULT_SEED,
            threads: None,
            smoke: false,
        }
    }
}

impl SuiteOptions {
    fn samples(&self, full: usize) -> usize {
        if self.smoke {
            (full / 20).max(100)
        } else {
            full
        }
    }

    fn case_seed(&self, id: u32, case: usize) -> u64 {
        self.seed
            .wrapping_mul(1_000_003)
            .wrapping_add(u64::from(id) * 100_000 + case as u64)
    }

    fn config(
        &self,
        id: u32,
        case: usize,
        dist: Distribution,
        n: usize,
        samples: usize,
        t: u32,
    ) -> SampleConfig {
        SampleConfig::new(dist, n, self.samples(samples), self.case_seed(id, case), t)
            .with_threads(self.threads)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub failures: usize,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub smoke: bool,
    pub criteria: Vec<CriterionResult>,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("suite report serializes")
    }
}

#[derive(Clone, Debug)]
pub struct SuiteRun {
    pub report: SuiteReport,
    /// Seconds spent per criterion, aligned with `report.criteria`.
    pub seconds: Vec<f64>,
}

impl SuiteRun {
    pub fn seconds_for(&self, id: u32) -> Option<f64> {
        let pos = self.report.criteria.iter().position(|c| c.id == id)?;
        self.seconds.get(pos).copied()
    }

    /// Whether criterion `id` met its wall-clock limit, if it has one.
    pub fn runtime_ok(&self, id: u32) -> bool {
        match RUNTIME_LIMITS.iter().find(|(c, _)| *c == id) {
            Some(&(_, limit)) => self.seconds_for(id).is_some_and(|s| s < limit),
            None => true,
        }
    }

    /// One line per criterion: id, verdict including runtime, name, detail.
    pub fn table(&self) -> String {
        let mut out = String::new();
        for (c, secs) in self.report.criteria.iter().zip(&self.seconds) {
            let ok = c.passed && self.runtime_ok(c.id);
            out.push_str(&format!(
                "{:>2} {} {} [{} cases, {} failures, {:.1}s] {}\n",
                c.id,
                if ok { "PASS" } else { "FAIL" },
                c.name,
                c.cases,
                c.failures,
                secs,
                c.detail
            ));
        }
        out
    }
}

struct Tally {
    cases: usize,
    failures: usize,
}

impl Tally {
    fn new() -> Self {
        Tally {
            cases: 0,
            failures: 0,
        }
    }

    fn record(&mut self, ok: bool) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
        }
    }

    fn finish(self, id: u32, name: &str, extra_ok: bool, detail: String) -> CriterionResult {
        CriterionResult {
            id,
            name: name.to_string(),
            passed: self.failures == 0 && extra_ok,
            cases: self.cases,
            failures: self.failures,
            detail,
        }
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len().is_multiple_of(2) {
        0.5 * (xs[m - 1] + xs[m])
    } else {
        xs[m]
    }
}

fn dists() -> [Distribution; 3] {
    [
        Distribution::Rademacher,
        Distribution::Gaussian,
        Distribution::Pbiased { p: 0.3 },
    ]
}

/// Runs criteria 1–11.
pub fn run_suite(opts: &SuiteOptions) -> Result<SuiteRun> {
    with_threads(opts.threads, || {
        let mut criteria = Vec::new();
        let mut seconds = Vec::new();
        for id in 1..=11 {
            let start = Instant::now();
            criteria.push(run_criterion(id, opts)?);
            seconds.push(start.elapsed().as_secs_f64());
        }
        Ok(SuiteRun {
            report: SuiteReport {
                seed: opts.seed,
                smoke: opts.smoke,
                criteria,
            },
            seconds,
        })
    })
}

/// Runs the suite with the configured worker count and again on one worker.
pub fn determinism_check(opts: &SuiteOptions) -> Result<(CriterionResult, SuiteRun)> {
    let first = run_suite(opts)?;
    let single = run_suite(&SuiteOptions {
        threads: Some(1),
        ..*opts
    })?;
    let (a, b) = (first.report.to_json(), single.report.to_json());
    let same = a == b;
    let mut tally = Tally::new();
    tally.record(same);
    let detail = format!(
        "{} bytes, threads {:?} vs 1: {}",
        a.len(),
        opts.threads,
        if same { "identical" } else { "differ" }
    );
    Ok((tally.finish(12, "suite determinism", true, detail), first))
}

pub fn run_criterion(id: u32, opts: &SuiteOptions) -> Result<CriterionResult> {
    match id {
        1 => schatten_correctness(opts),
        2 => dilation_identity(opts),
        3 => order_invariance(opts),
        4 => decoupling(opts),
        5 => rosenthal(opts),
        6 => multilinear_dominance(opts),
        7 => gaussian_dominance(opts),
        8 => trace_inequality(opts),
        9 => separator_oracle(opts),
        10 => graph_bounds(opts),
        11 => melon(opts),
        other => Err(crate::error::Error::param(format!(
            "no criterion {other} in run_criterion"
        ))),
    }
}

fn schatten_correctness(opts: &SuiteOptions) -> Result<CriterionResult> {
    let mut rng = sample_rng(opts.seed, 101);
    let mut tally = Tally::new();
    let mut worst = 0.0f64;
    for i in 0..200 {
        let (r, c) = if i == 0 {
            (200, 200)
        } else {
            (rng.random_range(1..=200), rng.random_range(1..=200))
        };
        let a = random_matrix(&mut rng, r, c);
        let two_t = 2 * (1 + i % 3) as u32;
        let err = rel_err(schatten_power(&a, two_t)?, trace_power_schatten(&a, two_t)?);
        worst = worst.max(err);
        tally.record(err <= 1e-9);
    }
    Ok(tally.finish(
        1,
        "Schatten correctness",
        true,
        format!("max rel err {worst:.3e}"),
    ))
}

fn dilation_identity(opts: &SuiteOptions) -> Result<CriterionResult> {
    let mut rng = sample_rng(opts.seed, 102);
    let mut tally = Tally::new();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (r, c) = (rng.random_range(1..=30), rng.random_range(1..=30));
        let a = random_matrix(&mut rng, r, c);
        let h = hermitian_dilation(&a);
        for t in 1..=3u32 {
            let err = rel_err(schatten_power(&h, 2 * t)?, 2.0 * schatten_power(&a, 2 * t)?);
            worst = worst.max(err);
            tally.record(err <= 1e-9);
        }
    }
    Ok(tally.finish(
        2,
        "dilation identity",
        true,
        format!("max rel err {worst:.3e}"),
    ))
}

fn order_invariance(opts: &SuiteOptions) -> Result<CriterionResult> {
    let mut rng = sample_rng(opts.seed, 103);
    let mut tally = Tally::new();
    let mut worst = 0.0f64;
    for i in 0..20 {
        let d = 1 + i % 3;
        let n = rng.random_range(d.max(2)..=8);
        let dims = (rng.random_range(1..=3), rng.random_range(1..=3));
        let terms = rng.random_range(2..=6);
        let f = random_multilinear(&mut rng, n, dims, &[d], terms);
        for (a, b, c) in crate::bounds::triples(d) {
            let orders: Vec<Vec<_>> = canonical_order(a, b, c)
                .into_iter()
                .permutations(d)
                .unique()
                .collect();
            for two_t in [4, 8] {
                let values: Vec<f64> = orders
                    .iter()
                    .map(|o| block_schatten_power(&build_block_with_order(&f, o)?, two_t))
                    .collect::<Result<_>>()?;
                let hi = values.iter().copied().fold(f64::MIN, f64::max);
                let lo = values.iter().copied().fold(f64::MAX, f64::min);
                let err = rel_err(hi, lo);
                worst = worst.max(err);
                tally.record(err <= 1e-9);
            }
        }
    }
    Ok(tally.finish(
        3,
        "order invariance",
        true,
        format!("max rel spread {worst:.3e}"),
    ))
}

fn decoupling(opts: &SuiteOptions) -> Result<CriterionResult> {
    let mut rng = sample_rng(opts.seed, 104);
    let mut tally = Tally::new();
    let mut worst = f64::NEG_INFINITY;
    let mut instances = vec![(quadratic_chaos(), Distribution::Rademacher)];
    for i in 0..10 {
        let d = 2 + i % 2;
        let n = rng.random_range(d + 1..=6);
        let dims = (rng.random_range(1..=3), rng.random_range(1..=3));
        let terms = rng.random_range(3..=6);
        instances.push((
            random_multilinear(&mut rng, n, dims, &[d], terms),
            dists()[i % 3],
        ));
    }
    for (case, (f, dist)) in instances.iter().enumerate() {
        let cfg = opts.config(4, case, *dist, f.n(), 20_000, 2);
        let r = decoupling_ratio(f, &cfg, DecouplingMode::Norm)?;
        worst = worst.max(r.lhs.log_mean - r.log_constant - r.rhs.log_mean);
        tally.record(r.holds);
    }
    for (case, shape) in [edge_shape(), path_shape(), triangle_shape()]
        .iter()
        .enumerate()
    {
        let cfg = opts.config(4, 100 + case, Distribution::Rademacher, 6, 20_000, 2);
        let r = decoupling_ratio_graph(shape, &cfg, DecouplingMode::Norm)?;
        worst = worst.max(r.lhs.log_mean - r.log_constant - r.rhs.log_mean);
        tally.record(r.holds);
    }
    Ok(tally.finish(
        4,
        "decoupling",
        true,
        format!("max ln(lhs / (C·rhs)) {worst:.3}"),
    ))
}

fn rosenthal(opts: &SuiteOptions) -> Result<CriterionResult> {
    let mut rng = sample_rng(opts.seed, 105);
    let mut tally = Tally::new();
    let mut worst = f64::NEG_INFINITY;
    let laws = [
        Distribution::Rademacher,
        Distribution::Pbiased { p: 0.2 },
        Distribution::Gaussian,
    ];
    for case in 0..100 {
        let m = rng.random_range(1..=10);
        let coeffs: Vec<_> = (0..m).map(|_| random_matrix(&mut rng, 4, 4)).collect();
        let dist = laws[case % 3];
        let cfg = opts.config(5, case, dist, m, 10_000, 2);
        let check = rosenthal_empirical(&coeffs, &dist, 2, &cfg)?;
        worst = worst.max(check.lhs.log_upper(4.0) - check.rhs.log_total);
        tally.record(check.holds);
    }
    Ok(tally.finish(
        5,
        "matrix Rosenthal",
        true,
        format!("max ln((mean+4se) / rhs) {worst:.3}"),
    ))
}

fn dominance_gap(est: &MomentEstimate, power: u32, report: &BoundReport) -> f64 {
    let upper = est.log_upper(4.0);
    match report.normalization {
        crate::bounds::Normalization::MomentPower => upper - report.log_total,
        crate::bounds::Normalization::MomentRoot => upper / f64::from(power) - report.log_total,
    }
}

fn multilinear_dominance(opts: &SuiteOptions) -> Result<CriterionResult> {
    let mut rng = sample_rng(opts.seed, 106);
    let mut tally = Tally::new();
    let mut worst = f64::NEG_INFINITY;
    let mut instances: Vec<(PolyMatrix, Distribution)> = vec![
        (quadratic_chaos(), Distribution::Rademacher),
        (quadratic_chaos(), Distribution::Pbiased { p: 0.5 }),
        (quadratic_chaos(), Distribution::Pbiased { p: 0.1 }),
    ];
    let shapes: [&[usize]; 10] = [
        &[2],
        &[2],
        &[2],
        &[3],
        &[3],
        &[1],
        &[1],
        &[1, 2],
        &[1, 2],
        &[2, 3],
    ];
    let laws = [
        Distribution::Rademacher,
        Distribution::Pbiased { p: 0.5 },
        Distribution::Pbiased { p: 0.1 },
    ];
    for (i, degrees) in shapes.iter().enumerate() {
        let n = rng.random_range(4..=6);
        let dims = (rng.random_range(1..=3), rng.random_range(1..=3));
        let terms = rng.random_range(2..=5);
        instances.push((
            random_multilinear(&mut rng, n, dims, degrees, terms),
            laws[i % 3],
        ));
    }
    let t = 2;
    for (case, (f, dist)) in instances.iter().enumerate() {
        let cfg = opts.config(6, case, *dist, f.n(), 10_000, t);
        let est = estimate_moment(f, &cfg, Quantity::Power { exponent: 4 * t })?;
        let mut reports = vec![multilinear_bound(f, dist, t)?];
        if let Ok(d) = f.homogeneous_degree() {
            reports.push(homogeneous_multilinear_bound(f, dist, t)?);
            if d == 2 {
                reports.push(quadratic_bound(f, dist, t)?);
            }
        }
        for r in &reports {
            worst = worst.max(dominance_gap(&est, 4 * t, r));
            tally.record(dominated_by(&est, 4 * t, r, 4.0));
        }
    }
    Ok(tally.finish(
        6,
        "multilinear recursion dominance",
        true,
        format!("max ln((mean+4se) / bound) {worst:.3}"),
    ))
}

fn gaussian_dominance(opts: &SuiteOptions) -> Result<CriterionResult> {
    let mut rng = sample_rng(opts.seed, 107);
    let mut tally = Tally::new();
    let mut worst = f64::NEG_INFINITY;
    let t = 2;
    for case in 0..10 {
        let d = 1 + case % 3;
        let n = rng.random_range(2..=6);
        let dims = (rng.random_range(1..=3), rng.random_range(1..=3));
        let terms = rng.random_range(2..=6);
        let p = random_gaussian_poly(&mut rng, n, dims, d, terms);
        let cfg = opts.config(7, case, Distribution::Gaussian, n, 10_000, t);
        let est = estimate_moment(&p, &cfg, Quantity::Power { exponent: 2 * t })?;
        let report = gaussian_bound(&p, t)?;
        worst = worst.max(dominance_gap(&est, 2 * t, &report));
        tally.record(dominated_by(&est, 2 * t, &report, 4.0));
    }
    Ok(tally.finish(
        7,
        "Gaussian recursion dominance",
        true,
        format!("max ln((mean+4se) / bound) {worst:.3}"),
    ))
}

fn trace_inequality(opts: &SuiteOptions) -> Result<CriterionResult> {
    let mut rng = sample_rng(opts.seed, 108);
    let mut tally = Tally::new();
    let mut worst = f64::NEG_INFINITY;
    for i in 0..300 {
        let m = rng.random_range(1..=5);
        let s = rng.random_range(1..=6);
        let r = [2.0, 3.0, 4.0][i % 3];
        let mats: Vec<_> = (0..m).map(|_| random_matrix(&mut rng, s, s)).collect();
        let c = trace_inequality_check(&mats, r)?;
        if c.rhs > 0.0 {
            worst = worst.max(c.lhs / c.rhs);
        }
        tally.record(c.holds);
    }
    Ok(tally.finish(
        8,
        "trace inequality",
        true,
        format!("max lhs/rhs {worst:.4}"),
    ))
}

/// Minimum separator size by scanning all subsets with an edge-list search.
fn oracle_min_size(shape: &Shape) -> usize {
    (0u32..1 << shape.k())
        .filter(|&mask| {
            let s: Vec<usize> = (0..shape.k()).filter(|&x| mask >> x & 1 == 1).collect();
            shape.separates(&s)
        })
        .map(u32::count_ones)
        .min()
        .expect("the full vertex set always separates") as usize
}

fn separator_oracle(opts: &SuiteOptions) -> Result<CriterionResult> {
    let mut rng = sample_rng(opts.seed, 109);
    let mut tally = Tally::new();
    for _ in 0..50 {
        let k = rng.random_range(2..=8);
        let shape = random_shape(&mut rng, k, 0.45);
        let sep = min_vertex_separator(&shape)?;
        tally.record(sep.size == oracle_min_size(&shape) && shape.separates(&sep.separator));
    }
    let forced = Shape::new(3, vec![(0, 2), (1, 2)], vec![0, 1], vec![1, 0])?;
    let single = Shape::new(3, vec![(0, 1), (1, 2)], vec![1], vec![1])?;
    let hand: [(Shape, Vec<usize>); 4] = [
        (path_shape(), vec![0]),
        (edge_shape(), vec![0]),
        (forced, vec![0, 1]),
        (single, vec![1]),
    ];
    for (shape, expected) in &hand {
        tally.record(min_vertex_separator(shape)?.separator == *expected);
    }
    Ok(tally.finish(
        9,
        "separator oracle",
        true,
        "50 random shapes, 4 hand cases".into(),
    ))
}

fn graph_bounds(opts: &SuiteOptions) -> Result<CriterionResult> {
    let mut tally = Tally::new();
    let shapes = [
        ("edge", edge_shape()),
        ("path", path_shape()),
        ("triangle", triangle_shape()),
    ];
    let t = 2;
    let mut worst = f64::NEG_INFINITY;
    for (s, (_, shape)) in shapes.iter().enumerate() {
        for (j, n) in [6, 8, 10].into_iter().enumerate() {
            let cfg = opts.config(10, 10 * s + j, Distribution::Rademacher, n, 2_000, t);
            let est = estimate_graph_moment(shape, &cfg, Quantity::Power { exponent: 4 * t })?;
            let bound = shape_bound(shape, n, 0.5, t, 3.0)?;
            worst = worst.max(dominance_gap(&est, 4 * t, &bound.report));
            tally.record(dominated_by(&est, 4 * t, &bound.report, 4.0));
        }
    }
    let grid: Vec<usize> = (8..=24).step_by(2).collect();
    let mut slopes = Vec::new();
    for (s, (name, shape)) in shapes.iter().enumerate() {
        let mut ln_n = Vec::new();
        let mut ln_med = Vec::new();
        for (j, &n) in grid.iter().enumerate() {
            let cfg = opts.config(10, 1000 + 100 * s + j, Distribution::Rademacher, n, 200, t);
            ln_n.push((n as f64).ln());
            ln_med.push(median(sample_graph_spectral_norms(shape, &cfg)?).ln());
        }
        let slope = ols_slope(&ln_n, &ln_med);
        let sep = min_vertex_separator(shape)?;
        let target = (shape.k() - sep.size) as f64 / 2.0;
        tally.record((slope - target).abs() <= 0.4);
        slopes.push(format!("{name} {slope:.3} (target {target})"));
    }
    Ok(tally.finish(
        10,
        "graph-matrix bound",
        true,
        format!("dominance max gap {worst:.3}; slopes {}", slopes.join(", ")),
    ))
}

fn melon(opts: &SuiteOptions) -> Result<CriterionResult> {
    let mut tally = Tally::new();
    let t = 2;
    let mut worst = f64::NEG_INFINITY;
    for (j, n) in [4, 6, 8].into_iter().enumerate() {
        let cfg = opts.config(11, j, Distribution::Gaussian, n, 2_000, t);
        let est = estimate_melon_moment(&cfg)?;
        let bound = melon_bound(n, t)?;
        worst = worst.max(dominance_gap(&est, 2 * t, &bound));
        tally.record(dominated_by(&est, 2 * t, &bound, 4.0));
    }
    let mut ln_n = Vec::new();
    let mut ln_m = Vec::new();
    for n in 4..=16usize {
        let cfg = opts.config(11, 100 + n, Distribution::Gaussian, n, 2_000, t);
        ln_n.push((n as f64).ln());
        ln_m.push(estimate_melon_moment(&cfg)?.log_mean);
    }
    let slope = ols_slope(&ln_n, &ln_m);
    let target = 3.0 * f64::from(t);
    tally.record((slope - target).abs() <= 0.5);
    Ok(tally.finish(
        11,
        "melon",
        true,
        format!("dominance max gap {worst:.3}; slope {slope:.3} (target {target} ± 0.5)"),
    ))
}
