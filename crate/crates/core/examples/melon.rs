//! The melon tensor network M[i, j] = ⟨T_i, T_j⟩.
//!
//! cargo run --release --example melon

use polymat::blocks::block_schatten_power;
use polymat::melon::{
    build_melon, estimate_melon_moment, log_m02_closed_form, m11_closed_form, melon_blocks,
    melon_bound,
};
use polymat::sampling::SampleConfig;
use polymat::Distribution;

fn main() -> polymat::Result<()> {
    let inst = build_melon(3, 1)?;
    println!("n = 3 instance: {:?}", inst.m);

    let b = melon_blocks(3)?;
    println!(
        "‖M_(0,2)‖_4^4 sparse {:.1}, closed form {:.1}",
        block_schatten_power(&b.m02, 4)?,
        log_m02_closed_form(3, 2).exp()
    );
    println!(
        "‖M_(1,1)‖_4^4 sparse {:.1}, closed form {:.1}",
        block_schatten_power(&b.m11, 4)?,
        m11_closed_form(3, 2)
    );

    for n in [4, 8, 12] {
        let cfg = SampleConfig::new(Distribution::Gaussian, n, 2_000, 5, 2);
        let est = estimate_melon_moment(&cfg)?;
        println!(
            "n = {n:>2}: E‖M − EM‖_4^4 ≈ {:.4e}, bound {}",
            est.mean,
            melon_bound(n, 2)?.display_total()
        );
    }
    Ok(())
}
