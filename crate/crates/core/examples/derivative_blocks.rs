//! Derivative block matrices of a quadratic chaos.
//!
//! cargo run --example derivative_blocks

use itertools::Itertools;
use polymat::blocks::{
    block_schatten_power, build_block, build_block_with_order, canonical_order, Block,
};
use polymat::bounds::triples;
use polymat::corpus::quadratic_chaos;

fn main() -> polymat::Result<()> {
    let f = quadratic_chaos();
    println!(
        "F on n = {} variables, {}×{} coefficients",
        f.n(),
        f.dims().0,
        f.dims().1
    );
    for (key, c) in f.terms() {
        println!(
            "  x{:?}: {:?}",
            key.iter().map(|i| i + 1).collect::<Vec<_>>(),
            c
        );
    }

    let b = build_block(&f, 0, 1, 1)?;
    let (rows, cols) = b.logical_dims();
    println!("\nF_(0,1,1) is {rows}×{cols}; nonzero blocks:");
    for ((r, c), block) in b.blocks() {
        if let Block::Value(m) = block {
            println!("  row {r:?} col {c:?}: {:?}", m.to_rows());
        }
    }
    let dense = b.to_dense(10_000)?;
    for row in dense.to_rows() {
        println!(
            "  {}",
            row.iter().map(|v| format!("{v:>4}")).collect::<String>()
        );
    }

    println!("\nSchatten 4-powers per (a,b,c), across all construction orders:");
    for (a, bb, c) in triples(2) {
        let values: Vec<f64> = canonical_order(a, bb, c)
            .into_iter()
            .permutations(2)
            .unique()
            .map(|o| block_schatten_power(&build_block_with_order(&f, &o)?, 4))
            .collect::<polymat::Result<_>>()?;
        println!("  ({a},{bb},{c}): {values:?}");
    }
    Ok(())
}
