//! The matrix Rosenthal inequality for a linear series Σ C_k x_k.
//!
//! cargo run --release --example rosenthal

use polymat::bounds::rosenthal_rhs;
use polymat::corpus::random_matrix;
use polymat::sampling::{rosenthal_empirical, sample_rng, SampleConfig};
use polymat::Distribution;

fn main() -> polymat::Result<()> {
    let mut rng = sample_rng(11, 0);
    let coeffs: Vec<_> = (0..6).map(|_| random_matrix(&mut rng, 4, 4)).collect();
    for dist in [
        Distribution::Rademacher,
        Distribution::pbiased(0.2)?,
        Distribution::Gaussian,
    ] {
        let rhs = rosenthal_rhs(&coeffs, &dist, 2)?;
        let cfg = SampleConfig::new(dist, coeffs.len(), 10_000, 5, 2);
        let check = rosenthal_empirical(&coeffs, &dist, 2, &cfg)?;
        println!(
            "{dist}: E‖S‖_8^8 ≈ {:.4e}, bound {}",
            check.lhs.mean,
            rhs.display_total()
        );
        for term in &rhs.terms {
            println!("  {:<14} {:.4e}", term.label, term.contribution());
        }
    }
    Ok(())
}
