//! Recursive moment bounds for a Rademacher chaos, checked against sampling.
//!
//! cargo run --release --example multilinear_bounds

use polymat::bounds::{homogeneous_multilinear_bound, multilinear_bound, quadratic_bound};
use polymat::corpus::quadratic_chaos;
use polymat::sampling::{dominated_by, estimate_moment, Quantity, SampleConfig};
use polymat::Distribution;

fn main() -> polymat::Result<()> {
    let f = quadratic_chaos();
    let t = 2;
    for dist in [Distribution::Rademacher, Distribution::pbiased(0.1)?] {
        let cfg = SampleConfig::new(dist, f.n(), 10_000, 7, t);
        let est = estimate_moment(&f, &cfg, Quantity::Power { exponent: 4 * t })?;
        println!(
            "{dist}: E‖F − EF‖_8^8 ≈ {:.4} ± {:.4}",
            est.mean, est.stderr
        );
        for report in [
            quadratic_bound(&f, &dist, t)?,
            homogeneous_multilinear_bound(&f, &dist, t)?,
            multilinear_bound(&f, &dist, t)?,
        ] {
            println!(
                "  {:?} ({:?}): {}  dominates: {}",
                report.theorem,
                report.normalization,
                report.display_total(),
                dominated_by(&est, 4 * t, &report, 4.0)
            );
            for term in &report.terms {
                println!(
                    "    {:<12} ln C = {:>8.3}  schatten = {:.4e}",
                    term.label, term.log_constant, term.schatten
                );
            }
        }
    }
    Ok(())
}
