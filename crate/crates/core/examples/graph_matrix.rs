//! Graph matrices: separators, the shape bound, and norm growth in n.
//!
//! cargo run --release --example graph_matrix

use polymat::corpus::{edge_shape, path_shape, triangle_shape};
use polymat::graph::{
    build_graph_matrix, min_vertex_separator, sample_graph_spectral_norms, shape_bound,
    shape_tail_bound, sparse_separator,
};
use polymat::linalg::spectral_norm;
use polymat::numerics::ols_slope;
use polymat::sampling::{sample_vector, SampleConfig};
use polymat::Distribution;

fn main() -> polymat::Result<()> {
    for (name, shape) in [
        ("edge", edge_shape()),
        ("path", path_shape()),
        ("triangle", triangle_shape()),
    ] {
        let sep = min_vertex_separator(&shape)?;
        let sparse = sparse_separator(&shape, 4.0, 100)?;
        println!(
            "{name}: separator {:?} (size {}), sparse separator at L=4, n=100: {:?}",
            sep.separator, sep.size, sparse.separator
        );

        let n = 10;
        let g = sample_vector(&Distribution::Rademacher, n * (n - 1) / 2, 1, 0);
        let m = build_graph_matrix(&shape, n, &g)?;
        let b = shape_bound(&shape, n, 0.5, 2, 3.0)?;
        let tail = shape_tail_bound(&shape, n, 0.5, 0.01, 3.0)?;
        println!(
            "  n = {n}: {}×{}, ‖M‖ = {:.3}; E‖M‖_8^8 ≤ {}; ‖M‖ ≤ {:.3e} w.p. 0.99",
            m.rows(),
            m.cols(),
            spectral_norm(&m),
            b.report.display_total(),
            tail.threshold
        );

        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for n in (8..=20).step_by(4) {
            let cfg = SampleConfig::new(Distribution::Rademacher, n, 100, 2, 2);
            let mut norms = sample_graph_spectral_norms(&shape, &cfg)?;
            norms.sort_by(f64::total_cmp);
            xs.push((n as f64).ln());
            ys.push(norms[norms.len() / 2].ln());
        }
        println!(
            "  log-log slope {:.2}, predicted {}",
            ols_slope(&xs, &ys),
            (shape.k() - sep.size) as f64 / 2.0
        );
    }
    Ok(())
}
