//! How many anchors a target hears, with and without frequency reuse.
//!
//! Run with `cargo run --release --example anchor_count_pmf`.

use netpeb::cli::Config;
use netpeb::localizability::{p_l_geq, pmf_with_reuse};

fn main() -> netpeb::Result<()> {
    let base = Config::default().network;
    println!("shadowing raises the effective density by {:.4}x", base.lambda_tilde() / base.lambda);

    let single = base.band();
    for ell in 1..=4 {
        println!("K=1  P[L >= {ell}] = {:.4}", p_l_geq(ell, &single)?);
    }

    for reuse in 1..=4 {
        let pmf = pmf_with_reuse(&netpeb::localizability::NetworkParams { reuse, ..base }, 30)?;
        let head: Vec<String> = pmf.probs().iter().take(9).map(|p| format!("{p:.3}")).collect();
        println!("K={reuse}  P[L >= 3] = {:.4}  pmf[0..9] = [{}]", pmf.survival(3), head.join(", "));
    }
    Ok(())
}
