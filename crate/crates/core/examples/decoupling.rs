//! Coupled against decoupled moments, for a polynomial and for a graph matrix.
//!
//! cargo run --release --example decoupling

use polymat::corpus::{path_shape, quadratic_chaos};
use polymat::graph::decoupling_ratio_graph;
use polymat::sampling::{decoupling_ratio, DecouplingMode, SampleConfig};
use polymat::Distribution;

fn main() -> polymat::Result<()> {
    let f = quadratic_chaos();
    for mode in [DecouplingMode::Norm, DecouplingMode::Power] {
        let cfg = SampleConfig::new(Distribution::Rademacher, f.n(), 20_000, 3, 2);
        let r = decoupling_ratio(&f, &cfg, mode)?;
        println!(
            "{mode:?}: coupled {:.4} ± {:.4}, decoupled {:.4} ± {:.4}, C = {:.1}, holds {}",
            r.lhs.mean,
            r.lhs.stderr,
            r.rhs.mean,
            r.rhs.stderr,
            r.log_constant.exp(),
            r.holds
        );
    }

    let shape = path_shape();
    let cfg = SampleConfig::new(Distribution::Rademacher, 8, 5_000, 3, 2);
    let r = decoupling_ratio_graph(&shape, &cfg, DecouplingMode::Norm)?;
    println!(
        "path shape, n = 8: coupled {:.3}, decoupled {:.3}, C = k^k = {:.0}, holds {}",
        r.lhs.mean,
        r.rhs.mean,
        r.log_constant.exp(),
        r.holds
    );
    Ok(())
}
