//! Command-line front end.
//!
//! Each subcommand writes one JSON envelope (or CSV table) that echoes its
//! resolved configuration. Exit codes: 0 success, 1 a requested check failed,
//! 2 invalid input, 3 a resource cap was hit.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::blocks::DEFAULT_GRAM_CAP;
use crate::bounds::{
    gaussian_bound, homogeneous_multilinear_bound, multilinear_bound, quadratic_bound,
    rosenthal_rhs, BoundReport,
};
use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::graph::{estimate_graph_moment, shape_bound, shape_tail_bound, Shape};
use crate::linalg::Matrix;
use crate::melon::{estimate_melon_moment, melon_bound};
use crate::polymatrix::{ParseLimits, PolyMatrix};
use crate::sampling::{
    decoupling_ratio, dominated_by, estimate_moment, rosenthal_empirical, DecouplingMode,
    MomentEstimate, Quantity, SampleConfig, THREADS_ENV,
};
use crate::suite::{determinism_check, SuiteOptions, DEFAULT_SEED};

/// Standard errors of slack allowed in every empirical check.
const CHECK_SIGMAS: f64 = 4.0;

#[derive(Parser, Debug)]
#[command(
    name = "polymat",
    version,
    about = "Norm bounds for polynomial random matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker cap; overrides POLYMAT_THREADS.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct DistArgs {
    /// rademacher, pbiased or gaussian.
    #[arg(long, default_value = "rademacher")]
    dist: String,
    /// Bias parameter of the p-biased law.
    #[arg(long)]
    p: Option<f64>,
}

impl DistArgs {
    fn resolve(&self) -> Result<Distribution> {
        Distribution::from_name(&self.dist, self.p)
    }
}

#[derive(Args, Debug)]
struct McArgs {
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TheoremArg {
    Auto,
    Quadratic,
    Homogeneous,
    Multilinear,
    Gaussian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum QuantityArg {
    Power,
    Norm,
    Spectral,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Norm,
    Power,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Recursive moment bound for a polynomial matrix.
    Bound {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, default_value_t = 2)]
        t: u32,
        #[arg(long, value_enum, default_value_t = TheoremArg::Auto)]
        theorem: TheoremArg,
        /// Also estimate the moment and report whether the bound dominates.
        #[arg(long)]
        check: bool,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Monte Carlo estimate of E‖F(x) − EF‖.
    Mc {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, default_value_t = 2)]
        t: u32,
        /// power: ‖·‖_{2t}^{2t}; norm: ‖·‖_{2t}; spectral: ‖·‖_op.
        #[arg(long, value_enum, default_value_t = QuantityArg::Power)]
        quantity: QuantityArg,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Coupled against decoupled moments of a homogeneous multilinear polynomial.
    Decouple {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, default_value_t = 2)]
        t: u32,
        #[arg(long, value_enum, default_value_t = ModeArg::Norm)]
        mode: ModeArg,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Rosenthal bound for a linear series Σ C_k x_k given as a degree-1 polynomial.
    Rosenthal {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, default_value_t = 2)]
        t: u32,
        #[arg(long)]
        check: bool,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Graph-matrix bound for a shape on G(n, p) with ±1-normalized entries.
    Shape {
        #[arg(long)]
        shape: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 2)]
        t: u32,
        /// Absolute constant in the combinatorial factor.
        #[arg(long, default_value_t = 3.0)]
        c: f64,
        /// Also report the tail threshold at this failure probability.
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        check: bool,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Bound on E‖M − EM‖_{2t}^{2t} for the melon network.
    Melon {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        t: u32,
        #[arg(long)]
        check: bool,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Runs the full acceptance corpus and prints a pass/fail table.
    Suite {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Reduced sample counts.
        #[arg(long)]
        smoke: bool,
    },
}

/// One CSV table.
struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

struct Outcome {
    json: Value,
    table: Table,
    /// Text for standard output when the report goes to a file or alongside it.
    summary: Option<String>,
    ok: bool,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(ok) => i32::from(!ok),
        Err(e) => {
            eprintln!("polymat: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ResourceCap { .. } => 3,
        _ => 2,
    }
}

fn threads(cli: &Cli) -> Result<Option<usize>> {
    match cli.threads {
        Some(0) => Err(Error::param("--threads must be at least 1")),
        Some(k) => Ok(Some(k)),
        None => Ok(None),
    }
}

fn execute(cli: &Cli) -> Result<bool> {
    let threads = threads(cli)?;
    let outcome = match &cli.command {
        Command::Bound {
            spec,
            dist,
            t,
            theorem,
            check,
            mc,
        } => bound(spec, dist, *t, *theorem, *check, mc, threads)?,
        Command::Mc {
            spec,
            dist,
            t,
            quantity,
            mc,
        } => monte_carlo(spec, dist, *t, *quantity, mc, threads)?,
        Command::Decouple {
            spec,
            dist,
            t,
            mode,
            mc,
        } => decouple(spec, dist, *t, *mode, mc, threads)?,
        Command::Rosenthal {
            spec,
            dist,
            t,
            check,
            mc,
        } => rosenthal(spec, dist, *t, *check, mc, threads)?,
        Command::Shape {
            shape,
            n,
            p,
            t,
            c,
            eps,
            check,
            mc,
        } => graph_shape(shape, *n, *p, *t, *c, *eps, *check, mc, threads)?,
        Command::Melon { n, t, check, mc } => melon(*n, *t, *check, mc, threads)?,
        Command::Suite { seed, smoke } => suite(*seed, *smoke, threads)?,
    };
    emit(cli, &outcome)?;
    Ok(outcome.ok)
}

fn emit(cli: &Cli, outcome: &Outcome) -> Result<()> {
    let body = match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&outcome.json)
                .map_err(|e| Error::Input(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Csv => to_csv(&outcome.table)?,
    };
    if let Some(summary) = &outcome.summary {
        print!("{summary}");
    }
    match &cli.out {
        Some(path) => fs::write(path, body)?,
        None if outcome.summary.is_none() => print!("{body}"),
        None => {}
    }
    Ok(())
}

fn to_csv(table: &Table) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(&table.header).map_err(err)?;
    for row in &table.rows {
        w.write_record(row).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load_poly(path: &Path) -> Result<PolyMatrix> {
    PolyMatrix::parse_with(&read(path)?, ParseLimits::default())
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn term_table(report: &BoundReport) -> Table {
    Table {
        header: vec!["label", "log_constant", "schatten", "log_contribution"],
        rows: report
            .terms
            .iter()
            .map(|t| {
                vec![
                    t.label.clone(),
                    t.log_constant.to_string(),
                    t.schatten.to_string(),
                    t.log_contribution.to_string(),
                ]
            })
            .collect(),
    }
}

fn estimate_table(rows: &[(&str, &MomentEstimate)]) -> Table {
    Table {
        header: vec![
            "role",
            "quantity",
            "mean",
            "stderr",
            "samples",
            "log_mean",
            "log_stderr",
        ],
        rows: rows
            .iter()
            .map(|(role, e)| {
                vec![
                    role.to_string(),
                    e.quantity.clone(),
                    e.mean.to_string(),
                    e.stderr.to_string(),
                    e.samples.to_string(),
                    e.log_mean.to_string(),
                    e.log_stderr.to_string(),
                ]
            })
            .collect(),
    }
}

fn sample_config(
    dist: Distribution,
    n: usize,
    mc: &McArgs,
    t: u32,
    threads: Option<usize>,
) -> SampleConfig {
    SampleConfig::new(dist, n, mc.samples, mc.seed, t).with_threads(threads)
}

fn mc_echo(mc: &McArgs, threads: Option<usize>) -> Value {
    json!({
        "samples": mc.samples,
        "seed": mc.seed,
        "threads": threads,
        "threads_env": THREADS_ENV,
        "check_sigmas": CHECK_SIGMAS,
    })
}

fn dominance(est: &MomentEstimate, power: u32, report: &BoundReport) -> Value {
    json!({
        "estimate": to_value(est),
        "power": power,
        "log_upper": est.log_upper(CHECK_SIGMAS),
        "dominated": dominated_by(est, power, report, CHECK_SIGMAS),
    })
}

fn bound(
    spec: &Path,
    dist: &DistArgs,
    t: u32,
    theorem: TheoremArg,
    check: bool,
    mc: &McArgs,
    threads: Option<usize>,
) -> Result<Outcome> {
    let f = load_poly(spec)?;
    let law = dist.resolve()?;
    let chosen = match theorem {
        TheoremArg::Auto if !f.is_multilinear() => TheoremArg::Gaussian,
        TheoremArg::Auto if f.homogeneous_degree().is_ok() => TheoremArg::Homogeneous,
        TheoremArg::Auto => TheoremArg::Multilinear,
        other => other,
    };
    let (report, power) = match chosen {
        TheoremArg::Gaussian => {
            if law != Distribution::Gaussian {
                return Err(Error::param("the Gaussian recursion needs --dist gaussian"));
            }
            (gaussian_bound(&f, t)?, 2 * t)
        }
        TheoremArg::Quadratic => (quadratic_bound(&f, &law, t)?, 4 * t),
        TheoremArg::Homogeneous => (homogeneous_multilinear_bound(&f, &law, t)?, 4 * t),
        TheoremArg::Multilinear | TheoremArg::Auto => (multilinear_bound(&f, &law, t)?, 4 * t),
    };
    let mut json = json!({
        "command": "bound",
        "config": {
            "spec": spec.display().to_string(),
            "dist": to_value(&law),
            "t": t,
            "theorem": format!("{chosen:?}").to_lowercase(),
            "gram_cap": DEFAULT_GRAM_CAP,
            "n": f.n(),
            "dims": f.dims(),
            "check": check,
            "mc": mc_echo(mc, threads),
        },
        "report": to_value(&report),
        "total": report.display_total(),
    });
    let mut ok = true;
    if check {
        let cfg = sample_config(law, f.n(), mc, t, threads);
        let est = estimate_moment(&f, &cfg, Quantity::Power { exponent: power })?;
        let verdict = dominance(&est, power, &report);
        ok = verdict["dominated"] == Value::Bool(true);
        json["check"] = verdict;
    }
    Ok(Outcome {
        json,
        table: term_table(&report),
        summary: None,
        ok,
    })
}

fn monte_carlo(
    spec: &Path,
    dist: &DistArgs,
    t: u32,
    quantity: QuantityArg,
    mc: &McArgs,
    threads: Option<usize>,
) -> Result<Outcome> {
    if t == 0 {
        return Err(Error::param("t must be at least 1"));
    }
    let f = load_poly(spec)?;
    let law = dist.resolve()?;
    let q = match quantity {
        QuantityArg::Power => Quantity::Power { exponent: 2 * t },
        QuantityArg::Norm => Quantity::Norm { exponent: 2 * t },
        QuantityArg::Spectral => Quantity::Spectral,
    };
    let cfg = sample_config(law, f.n(), mc, t, threads);
    let est = estimate_moment(&f, &cfg, q)?;
    let json = json!({
        "command": "mc",
        "config": {
            "spec": spec.display().to_string(),
            "dist": to_value(&law),
            "t": t,
            "quantity": to_value(&q),
            "centered": true,
            "mc": mc_echo(mc, threads),
        },
        "estimate": to_value(&est),
    });
    Ok(Outcome {
        json,
        table: estimate_table(&[("estimate", &est)]),
        summary: None,
        ok: true,
    })
}

fn decouple(
    spec: &Path,
    dist: &DistArgs,
    t: u32,
    mode: ModeArg,
    mc: &McArgs,
    threads: Option<usize>,
) -> Result<Outcome> {
    if t == 0 {
        return Err(Error::param("t must be at least 1"));
    }
    let f = load_poly(spec)?;
    let law = dist.resolve()?;
    let mode = match mode {
        ModeArg::Norm => DecouplingMode::Norm,
        ModeArg::Power => DecouplingMode::Power,
    };
    let cfg = sample_config(law, f.n(), mc, t, threads);
    let r = decoupling_ratio(&f, &cfg, mode)?;
    let json = json!({
        "command": "decouple",
        "config": {
            "spec": spec.display().to_string(),
            "dist": to_value(&law),
            "t": t,
            "mode": to_value(&mode),
            "mc": mc_echo(mc, threads),
        },
        "result": to_value(&r),
    });
    Ok(Outcome {
        json,
        table: estimate_table(&[("coupled", &r.lhs), ("decoupled", &r.rhs)]),
        summary: None,
        ok: r.holds,
    })
}

/// Coefficients of a degree-1 polynomial, in variable order.
fn linear_coefficients(f: &PolyMatrix) -> Result<Vec<Matrix>> {
    if f.terms().keys().any(|k| k.len() != 1) {
        return Err(Error::param(
            "the Rosenthal series needs a polynomial whose terms all have degree 1",
        ));
    }
    Ok(f.terms().values().cloned().collect())
}

fn rosenthal(
    spec: &Path,
    dist: &DistArgs,
    t: u32,
    check: bool,
    mc: &McArgs,
    threads: Option<usize>,
) -> Result<Outcome> {
    let f = load_poly(spec)?;
    let law = dist.resolve()?;
    let coeffs = linear_coefficients(&f)?;
    let mut json = json!({
        "command": "rosenthal",
        "config": {
            "spec": spec.display().to_string(),
            "dist": to_value(&law),
            "t": t,
            "terms": coeffs.len(),
            "check": check,
            "mc": mc_echo(mc, threads),
        },
    });
    let (report, ok) = if check {
        let cfg = sample_config(law, coeffs.len(), mc, t, threads);
        let c = rosenthal_empirical(&coeffs, &law, t, &cfg)?;
        json["check"] = json!({
            "estimate": to_value(&c.lhs),
            "power": 4 * t,
            "log_upper": c.lhs.log_upper(CHECK_SIGMAS),
            "dominated": c.holds,
        });
        (c.rhs, c.holds)
    } else {
        (rosenthal_rhs(&coeffs, &law, t)?, true)
    };
    json["total"] = Value::String(report.display_total());
    json["report"] = to_value(&report);
    Ok(Outcome {
        json,
        table: term_table(&report),
        summary: None,
        ok,
    })
}

#[allow(clippy::too_many_arguments)]
fn graph_shape(
    path: &Path,
    n: usize,
    p: f64,
    t: u32,
    c: f64,
    eps: Option<f64>,
    check: bool,
    mc: &McArgs,
    threads: Option<usize>,
) -> Result<Outcome> {
    let shape = Shape::parse(&read(path)?)?;
    for w in shape.warnings() {
        eprintln!("polymat: warning: {w}");
    }
    let b = shape_bound(&shape, n, p, t, c)?;
    let mut json = json!({
        "command": "shape",
        "config": {
            "shape": path.display().to_string(),
            "n": n,
            "p": p,
            "t": t,
            "c": c,
            "eps": eps,
            "check": check,
            "mc": mc_echo(mc, threads),
        },
        "bound": to_value(&b),
        "total": b.report.display_total(),
    });
    if let Some(eps) = eps {
        json["tail"] = to_value(&shape_tail_bound(&shape, n, p, eps, c)?);
    }
    let mut ok = true;
    if check {
        let cfg = sample_config(Distribution::pbiased(p)?, n, mc, t, threads);
        let est = estimate_graph_moment(&shape, &cfg, Quantity::Power { exponent: 4 * t })?;
        let verdict = dominance(&est, 4 * t, &b.report);
        ok = verdict["dominated"] == Value::Bool(true);
        json["check"] = verdict;
    }
    Ok(Outcome {
        json,
        table: term_table(&b.report),
        summary: None,
        ok,
    })
}

fn melon(n: usize, t: u32, check: bool, mc: &McArgs, threads: Option<usize>) -> Result<Outcome> {
    let report = melon_bound(n, t)?;
    let mut json = json!({
        "command": "melon",
        "config": { "n": n, "t": t, "check": check, "mc": mc_echo(mc, threads) },
        "report": to_value(&report),
        "total": report.display_total(),
    });
    let mut ok = true;
    if check {
        let cfg = sample_config(Distribution::Gaussian, n, mc, t, threads);
        let est = estimate_melon_moment(&cfg)?;
        let verdict = dominance(&est, 2 * t, &report);
        ok = verdict["dominated"] == Value::Bool(true);
        json["check"] = verdict;
    }
    Ok(Outcome {
        json,
        table: term_table(&report),
        summary: None,
        ok,
    })
}

fn suite(seed: u64, smoke: bool, threads: Option<usize>) -> Result<Outcome> {
    let opts = SuiteOptions {
        seed,
        threads,
        smoke,
    };
    let (row12, run) = determinism_check(&opts)?;
    let mut summary = run.table();
    let ok = run
        .report
        .criteria
        .iter()
        .all(|c| c.passed && run.runtime_ok(c.id))
        && row12.passed;
    summary.push_str(&format!(
        "{:>2} {} {} [{} cases, {} failures] {}\n",
        row12.id,
        if row12.passed { "PASS" } else { "FAIL" },
        row12.name,
        row12.cases,
        row12.failures,
        row12.detail
    ));
    let mut rows: Vec<Vec<String>> = run
        .report
        .criteria
        .iter()
        .chain(std::iter::once(&row12))
        .map(|c| {
            vec![
                c.id.to_string(),
                c.name.clone(),
                c.passed.to_string(),
                c.cases.to_string(),
                c.failures.to_string(),
                c.detail.clone(),
            ]
        })
        .collect();
    rows.sort_by_key(|r| r[0].parse::<u32>().unwrap_or(0));
    let mut criteria = to_value(&run.report.criteria);
    if let Value::Array(list) = &mut criteria {
        list.push(to_value(&row12));
    }
    let json = json!({
        "command": "suite",
        "config": { "seed": seed, "smoke": smoke, "threads": threads },
        "criteria": criteria,
    });
    Ok(Outcome {
        json,
        table: Table {
            header: vec!["id", "name", "passed", "cases", "failures", "detail"],
            rows,
        },
        summary: Some(summary),
        ok,
    })
}
