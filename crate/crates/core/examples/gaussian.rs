//! The Gaussian recursion for polynomials with repeated variables.
//!
//! cargo run --release --example gaussian

use polymat::blocks::build_gaussian_block;
use polymat::bounds::gaussian_bound;
use polymat::sampling::{dominated_by, estimate_moment, Quantity, SampleConfig};
use polymat::{Distribution, PolyMatrix};

const SPEC: &str = include_str!("../data/gaussian_quadratic.json");

fn main() -> polymat::Result<()> {
    let p = PolyMatrix::parse(SPEC)?;
    println!(
        "degree {} on {} variables, multilinear: {}",
        p.degree(),
        p.n(),
        p.is_multilinear()
    );
    let hessian = build_gaussian_block(&p, 1, 1);
    println!("P_(1,1) blocks: {}", hessian.blocks().len());

    let t = 2;
    let report = gaussian_bound(&p, t)?;
    let cfg = SampleConfig::new(Distribution::Gaussian, p.n(), 10_000, 9, t);
    let est = estimate_moment(&p, &cfg, Quantity::Power { exponent: 2 * t })?;
    println!("E‖P − EP‖_4^4 ≈ {:.4} ± {:.4}", est.mean, est.stderr);
    println!(
        "bound {} dominates: {}",
        report.display_total(),
        dominated_by(&est, 2 * t, &report, 4.0)
    );
    for term in &report.terms {
        println!("  {:<6} {:.4e}", term.label, term.contribution());
    }
    Ok(())
}
