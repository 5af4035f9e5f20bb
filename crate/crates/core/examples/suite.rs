//! Runs the seeded acceptance corpus once and prints the table.
//!
//! cargo run --release --example suite

use polymat::suite::{run_suite, SuiteOptions};

fn main() -> polymat::Result<()> {
    let run = run_suite(&SuiteOptions::default())?;
    print!("{}", run.table());
    Ok(())
}
