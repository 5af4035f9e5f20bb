//! Schatten norms through singular values and through trace powers, and the
//! Hermitian dilation that turns a rectangular matrix into a symmetric one.
//!
//! cargo run --example schatten

use polymat::corpus::random_matrix;
use polymat::linalg::{
    hermitian_dilation, schatten_norm, schatten_power, spectral_norm, trace_power_schatten,
};
use polymat::sampling::sample_rng;
use polymat::Matrix;

fn main() -> polymat::Result<()> {
    let a = Matrix::from_rows(&[vec![1.0, 2.0, 0.0], vec![0.0, 1.0, -1.0]])?;
    println!("A = {a:?}");
    for t in 1..=3u32 {
        println!(
            "‖A‖_{0}^{0}: svd {1:.12}  trace {2:.12}",
            2 * t,
            schatten_power(&a, 2 * t)?,
            trace_power_schatten(&a, 2 * t)?
        );
    }
    println!(
        "‖A‖_op = {:.6}, ‖A‖_4 = {:.6}",
        spectral_norm(&a),
        schatten_norm(&a, 4)?
    );

    let h = hermitian_dilation(&a);
    println!(
        "H(A) is {}×{}, symmetric: {}",
        h.rows(),
        h.cols(),
        h.is_symmetric(0.0)
    );
    println!(
        "‖H(A)‖_6^6 / ‖A‖_6^6 = {:.12}",
        schatten_power(&h, 6)? / schatten_power(&a, 6)?
    );

    let mut rng = sample_rng(1, 0);
    let big = random_matrix(&mut rng, 200, 120);
    let (s, tr) = (schatten_power(&big, 6)?, trace_power_schatten(&big, 6)?);
    println!(
        "200×120 Gaussian, ‖·‖_6^6: {s:.6e} vs {tr:.6e} (rel {:.1e})",
        (s - tr).abs() / s
    );
    Ok(())
}
